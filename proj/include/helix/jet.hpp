#ifndef HELIX_JET_HPP
#define HELIX_JET_HPP

#include <vector>

#include "helix/errors.hpp"

namespace helix {

// Truncated Taylor expansion of a smooth function of one or two variables.
//
// A jet stores the coefficients c_{ab} of
//     f(u0 + du, v0 + dv) = sum_{a+b <= order} c_{ab} du^a dv^b
// densely over the triangle a + b <= order (a single row for one variable).
// Arithmetic and the analytic maps below propagate every retained coefficient
// exactly, so coefficients are derivatives up to factorials with no truncation
// error beyond the order cap. Orders up to 4 are supported, which is as deep
// as any consumer differentiates.
class Jet {
public:
    static constexpr int max_order = 4;

    Jet() : vars_(1), order_(0), c_(1, 0.0) {}

    // A jet with value `v` and zero derivatives.
    static Jet constant(double v, int num_vars, int order);

    // The coordinate function u_index seeded at value `v`: unit first-order
    // coefficient in its own slot, zero elsewhere.
    static Jet variable(double v, int index, int num_vars, int order);

    int num_vars() const { return vars_; }
    int order() const { return order_; }

    double value() const { return c_[0]; }

    // Coefficient of du^a dv^b (dv ignored for one-variable jets).
    double coeff(int a, int b = 0) const;
    // Partial derivative d^{a+b} f / du^a dv^b = a! b! * coeff(a, b).
    double partial(int a, int b = 0) const;

    double& at(int a, int b = 0);
    double at(int a, int b = 0) const { return coeff(a, b); }

    // Same jet truncated to a lower order.
    Jet truncated(int new_order) const;
    // Derivative with respect to variable `var`; result has order - 1.
    Jet differentiated(int var) const;

    Jet operator-() const;
    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(double s);

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator+(Jet a, double s) { a.c_[0] += s; return a; }
    friend Jet operator+(double s, Jet a) { a.c_[0] += s; return a; }
    friend Jet operator-(Jet a, double s) { a.c_[0] -= s; return a; }
    friend Jet operator-(double s, const Jet& a) { Jet r = -a; r.c_[0] += s; return r; }
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

    // Analytic maps, computed by composing the truncated Taylor series of the
    // outer function about the jet's value with the nilpotent part.
    friend Jet sqrt(const Jet& a);
    friend Jet sin(const Jet& a);
    friend Jet cos(const Jet& a);
    friend Jet exp(const Jet& a);
    friend Jet reciprocal(const Jet& a);

private:
    Jet(int num_vars, int order);

    static int storage_size(int num_vars, int order);
    int index(int a, int b) const;
    void check_compatible(const Jet& o) const;
    // sum_k series[k] * (a - value)^k, truncated; series[k] = f^(k)(value)/k!.
    static Jet compose(const Jet& a, const double* series);

    int vars_;
    int order_;
    std::vector<double> c_;
};

} // namespace helix

#endif
