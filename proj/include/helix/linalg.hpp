#ifndef HELIX_LINALG_HPP
#define HELIX_LINALG_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "helix/errors.hpp"

namespace helix {

// Dense coordinate vector in the ambient embedding space (dimension <= 6).
using Vec = std::vector<double>;

inline Vec vadd(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec vsub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec vscale(const Vec& a, double s) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

inline void vaxpy(Vec& y, double a, const Vec& x) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// Plain Euclidean dot product; signature-aware products live with the ambient.
inline double vdot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double vnorm(const Vec& a) { return std::sqrt(vdot(a, a)); }

// 2x2 matrix in a fixed tangent frame.
struct Mat2 {
    double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

    double& operator()(int i, int j) { return m[i][j]; }
    double operator()(int i, int j) const { return m[i][j]; }

    static Mat2 identity() {
        Mat2 r;
        r.m[0][0] = r.m[1][1] = 1.0;
        return r;
    }
    static Mat2 diag(double a, double b) {
        Mat2 r;
        r.m[0][0] = a;
        r.m[1][1] = b;
        return r;
    }

    double trace() const { return m[0][0] + m[1][1]; }
    double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

    Mat2 operator-(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
        return r;
    }
    Mat2 operator+(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
        return r;
    }
    Mat2 operator*(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
        return r;
    }
    Mat2 scaled(double s) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] * s;
        return r;
    }
    double frobenius_sq() const {
        double s = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) s += m[i][j] * m[i][j];
        return s;
    }
    double max_abs() const {
        double s = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) s = std::max(s, std::abs(m[i][j]));
        return s;
    }
};

// Eigenvalues of a symmetric 2x2 matrix, ascending.
inline std::array<double, 2> sym_eigenvalues(const Mat2& a) {
    const double mean = 0.5 * a.trace();
    const double off = 0.5 * (a(0, 0) - a(1, 1));
    const double rad = std::sqrt(off * off + a(0, 1) * a(1, 0));
    return {mean - rad, mean + rad};
}

// Difference between the extreme eigenvalues of a symmetric 2x2 matrix;
// zero exactly when the matrix is a multiple of the identity.
inline double eigen_spread(const Mat2& a) {
    auto ev = sym_eigenvalues(a);
    return ev[1] - ev[0];
}

// Eigenvalues of a symmetric 3x3 matrix by cyclic Jacobi sweeps, ascending.
inline std::array<double, 3> sym_eigenvalues3(std::array<std::array<double, 3>, 3> a) {
    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
        if (off < 1e-15) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(a[p][q]) < 1e-18) continue;
                const double theta = 0.5 * std::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
                const double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < 3; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    std::array<double, 3> ev = {a[0][0], a[1][1], a[2][2]};
    if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
    if (ev[1] > ev[2]) std::swap(ev[1], ev[2]);
    if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
    return ev;
}

} // namespace helix

#endif
