#include "helix/jet.hpp"

#include <cmath>
#include <string>

namespace helix {

namespace {
constexpr double kDomainFloor = 1e-12;

// Offset of the degree block k in triangular two-variable storage. Within a
// block, coefficients are ordered by increasing b: (k,0), (k-1,1), ..., (0,k).
inline int block_offset(int k) { return k * (k + 1) / 2; }
} // namespace

Jet::Jet(int num_vars, int order)
    : vars_(num_vars), order_(order), c_(storage_size(num_vars, order), 0.0) {}

int Jet::storage_size(int num_vars, int order) {
    if (num_vars != 1 && num_vars != 2)
        throw ShapeError("jet supports 1 or 2 variables, got " + std::to_string(num_vars));
    if (order < 0 || order > max_order)
        throw ShapeError("jet order must be in [0, 4], got " + std::to_string(order));
    return num_vars == 1 ? order + 1 : (order + 1) * (order + 2) / 2;
}

Jet Jet::constant(double v, int num_vars, int order) {
    Jet j(num_vars, order);
    j.c_[0] = v;
    return j;
}

Jet Jet::variable(double v, int index, int num_vars, int order) {
    Jet j(num_vars, order);
    if (index < 0 || index >= num_vars)
        throw ShapeError("variable index " + std::to_string(index) + " out of range");
    j.c_[0] = v;
    if (order >= 1)
        j.c_[num_vars == 1 ? 1 : (index == 0 ? 1 : 2)] = 1.0;
    return j;
}

int Jet::index(int a, int b) const {
    return vars_ == 1 ? a : block_offset(a + b) + b;
}

double Jet::coeff(int a, int b) const {
    if (a < 0 || b < 0 || (vars_ == 1 && b != 0)) throw ShapeError("bad coefficient index");
    if (a + b > order_) return 0.0;
    return c_[index(a, b)];
}

double& Jet::at(int a, int b) {
    if (a < 0 || b < 0 || a + b > order_ || (vars_ == 1 && b != 0))
        throw ShapeError("bad coefficient index");
    return c_[index(a, b)];
}

double Jet::partial(int a, int b) const {
    static const double fact[5] = {1, 1, 2, 6, 24};
    return coeff(a, b) * fact[a] * fact[b];
}

Jet Jet::truncated(int new_order) const {
    if (new_order > order_) throw ShapeError("cannot truncate upward");
    Jet r(vars_, new_order);
    for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = c_[i];
    return r;
}

Jet Jet::differentiated(int var) const {
    if (order_ == 0) throw ShapeError("cannot differentiate an order-0 jet");
    if (var < 0 || var >= vars_) throw ShapeError("bad derivative variable");
    Jet r(vars_, order_ - 1);
    if (vars_ == 1) {
        for (int a = 0; a <= r.order_; ++a) r.c_[a] = (a + 1) * c_[a + 1];
    } else {
        for (int a = 0; a <= r.order_; ++a)
            for (int b = 0; a + b <= r.order_; ++b)
                r.c_[r.index(a, b)] = var == 0 ? (a + 1) * c_[index(a + 1, b)]
                                               : (b + 1) * c_[index(a, b + 1)];
    }
    return r;
}

void Jet::check_compatible(const Jet& o) const {
    if (vars_ != o.vars_ || order_ != o.order_)
        throw ShapeError("jet shape mismatch: (" + std::to_string(vars_) + "," +
                         std::to_string(order_) + ") vs (" + std::to_string(o.vars_) +
                         "," + std::to_string(o.order_) + ")");
}

Jet Jet::operator-() const {
    Jet r = *this;
    for (double& x : r.c_) x = -x;
    return r;
}

Jet& Jet::operator+=(const Jet& o) {
    check_compatible(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    check_compatible(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (double& x : c_) x *= s;
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    a.check_compatible(b);
    Jet r(a.vars_, a.order_);
    if (a.vars_ == 1) {
        for (int i = 0; i <= a.order_; ++i)
            for (int j = 0; i + j <= a.order_; ++j)
                r.c_[i + j] += a.c_[i] * b.c_[j];
    } else {
        for (int ka = 0; ka <= a.order_; ++ka)
            for (int ia = 0; ia <= ka; ++ia) {
                const double av = a.c_[block_offset(ka) + ia]; // degree (ka-ia, ia)
                if (av == 0.0) continue;
                for (int kb = 0; ka + kb <= a.order_; ++kb)
                    for (int ib = 0; ib <= kb; ++ib)
                        r.c_[block_offset(ka + kb) + ia + ib] +=
                            av * b.c_[block_offset(kb) + ib];
            }
    }
    return r;
}

Jet Jet::compose(const Jet& a, const double* series) {
    // Horner evaluation in the nilpotent part n = a - a.value():
    // result = s0 + n*(s1 + n*(s2 + ...)).
    Jet n = a;
    n.c_[0] = 0.0;
    Jet r = Jet::constant(series[a.order_], a.vars_, a.order_);
    for (int k = a.order_ - 1; k >= 0; --k) {
        r = n * r;
        r.c_[0] += series[k];
    }
    return r;
}

Jet sqrt(const Jet& a) {
    const double x = a.value();
    if (x <= kDomainFloor)
        throw DomainError("sqrt of jet with value " + std::to_string(x) +
                          " at or below domain floor 1e-12");
    double s[Jet::max_order + 1];
    s[0] = std::sqrt(x);
    for (int k = 0; k < a.order(); ++k)
        s[k + 1] = s[k] * (0.5 - k) / ((k + 1) * x);
    return Jet::compose(a, s);
}

Jet reciprocal(const Jet& a) {
    const double x = a.value();
    if (std::abs(x) <= kDomainFloor)
        throw DomainError("reciprocal of jet with value " + std::to_string(x) +
                          " within domain floor 1e-12 of zero");
    double s[Jet::max_order + 1];
    s[0] = 1.0 / x;
    for (int k = 0; k < a.order(); ++k) s[k + 1] = -s[k] / x;
    return Jet::compose(a, s);
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

Jet exp(const Jet& a) {
    double s[Jet::max_order + 1];
    s[0] = std::exp(a.value());
    for (int k = 0; k < a.order(); ++k) s[k + 1] = s[k] / (k + 1);
    return Jet::compose(a, s);
}

Jet sin(const Jet& a) {
    const double sv = std::sin(a.value());
    const double cv = std::cos(a.value());
    const double cycle[4] = {sv, cv, -sv, -cv};
    double s[Jet::max_order + 1];
    double fact = 1.0;
    for (int k = 0; k <= a.order(); ++k) {
        if (k > 0) fact *= k;
        s[k] = cycle[k % 4] / fact;
    }
    return Jet::compose(a, s);
}

Jet cos(const Jet& a) {
    const double sv = std::sin(a.value());
    const double cv = std::cos(a.value());
    const double cycle[4] = {cv, -sv, -cv, sv};
    double s[Jet::max_order + 1];
    double fact = 1.0;
    for (int k = 0; k <= a.order(); ++k) {
        if (k > 0) fact *= k;
        s[k] = cycle[k % 4] / fact;
    }
    return Jet::compose(a, s);
}

} // namespace helix
