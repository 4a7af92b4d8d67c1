#ifndef HELIX_JETVEC_HPP
#define HELIX_JETVEC_HPP

#include "helix/ambient.hpp"
#include "helix/jet.hpp"

namespace helix {

// Ambient vector whose components are jets: a coordinate field together with
// its parameter derivatives. All helpers require matching jet shapes.
using JVec = std::vector<Jet>;

inline JVec jv_zero(const Jet& like, int dim) {
    return JVec(dim, Jet::constant(0.0, like.num_vars(), like.order()));
}

inline JVec jv_add(const JVec& a, const JVec& b) {
    JVec r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

inline JVec jv_sub(const JVec& a, const JVec& b) {
    JVec r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

inline JVec jv_scale(const JVec& a, const Jet& s) {
    JVec r = a;
    for (auto& x : r) x = x * s;
    return r;
}

inline JVec jv_scale(const JVec& a, double s) {
    JVec r = a;
    for (auto& x : r) x *= s;
    return r;
}

inline void jv_axpy(JVec& y, const Jet& a, const JVec& x) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

inline void jv_axpy(JVec& y, double a, const JVec& x) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += x[i] * a;
}

inline JVec jv_truncated(const JVec& a, int order) {
    JVec r;
    r.reserve(a.size());
    for (const auto& x : a) r.push_back(x.truncated(order));
    return r;
}

inline JVec jv_differentiated(const JVec& a, int var) {
    JVec r;
    r.reserve(a.size());
    for (const auto& x : a) r.push_back(x.differentiated(var));
    return r;
}

// Signature-weighted inner product of jet vectors.
inline Jet jv_inner(const ProductAmbient& pa, const JVec& a, const JVec& b) {
    Jet s = Jet::constant(0.0, a[0].num_vars(), a[0].order());
    for (int i = 0; i < pa.dim(); ++i) {
        Jet t = a[i] * b[i];
        if (pa.sig(i) < 0) t *= -1.0;
        s += t;
    }
    return s;
}

// Inner product over the space-form block only.
inline Jet jv_inner_m(const ProductAmbient& pa, const JVec& a, const JVec& b) {
    Jet s = Jet::constant(0.0, a[0].num_vars(), a[0].order());
    for (int i = 0; i < pa.m_dim(); ++i) {
        Jet t = a[i] * b[i];
        if (pa.sig(i) < 0) t *= -1.0;
        s += t;
    }
    return s;
}

inline JVec jv_m_block(const ProductAmbient& pa, const JVec& v) {
    JVec r = v;
    r[pa.xi_index()] = Jet::constant(0.0, v[0].num_vars(), v[0].order());
    return r;
}

inline Vec jv_values(const JVec& a) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i].value();
    return r;
}

inline JVec jv_from_values(const Vec& v, int num_vars, int order) {
    JVec r;
    r.reserve(v.size());
    for (double x : v) r.push_back(Jet::constant(x, num_vars, order));
    return r;
}

} // namespace helix

#endif
