#include "helix/surface_geometry.hpp"

#include <algorithm>
#include <cmath>

#include "helix/errors.hpp"

namespace helix {

namespace {

Jet safe_sqrt(const Jet& sq) {
    // Norm jets: below the floor the square root is not smoothly defined;
    // fall back to a constant so downstream value-level logic still works.
    if (sq.value() > 1e-12) return sqrt(sq);
    return Jet::constant(std::sqrt(std::max(sq.value(), 0.0)), sq.num_vars(), sq.order());
}

JVec axis_jet(const ProductAmbient& pa, int axis, int order) {
    JVec w(pa.dim(), Jet::constant(0.0, 2, order));
    w[axis] = Jet::constant(1.0, 2, order);
    return w;
}

// <sigma(e_i, e_j), field> for an order-`order` ambient field: contract the
// covariant hessian with the frame components.
Jet sff_component(const GeometryJets& g, int i, int j, const JVec& field) {
    const FrameField& X = (i == 0) ? g.e1 : g.e2;
    const FrameField& Y = (j == 0) ? g.e1 : g.e2;
    int o = g.order;
    Jet xa = X.a.truncated(o), xb = X.b.truncated(o);
    Jet ya = Y.a.truncated(o), yb = Y.b.truncated(o);
    Jet s = xa * ya * jv_inner(g.pa, g.ddf[0][0], field);
    s += (xa * yb + xb * ya) * jv_inner(g.pa, g.ddf[0][1], field);
    s += xb * yb * jv_inner(g.pa, g.ddf[1][1], field);
    return s;
}

Jet det3(const Jet a[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

// Intrinsic Gauss curvature from the first fundamental form alone
// (Brioschi determinant formula), one order below the metric coefficients.
Jet brioschi(const GeometryJets& g) {
    int ko = g.order - 1;
    Jet E = g.E.truncated(ko), F = g.F.truncated(ko), G = g.G.truncated(ko);
    Jet Eu = g.E.differentiated(0).truncated(ko), Ev = g.E.differentiated(1).truncated(ko);
    Jet Fu = g.F.differentiated(0).truncated(ko), Fv = g.F.differentiated(1).truncated(ko);
    Jet Gu = g.G.differentiated(0).truncated(ko), Gv = g.G.differentiated(1).truncated(ko);
    Jet Evv = g.E.differentiated(1).differentiated(1).truncated(ko);
    Jet Fuv = g.F.differentiated(0).differentiated(1).truncated(ko);
    Jet Guu = g.G.differentiated(0).differentiated(0).truncated(ko);

    Jet m1[3][3] = {
        {Evv * -0.5 + Fuv - Guu * 0.5, Eu * 0.5, Fu - Ev * 0.5},
        {Fv - Gu * 0.5, E, F},
        {Gv * 0.5, F, G},
    };
    Jet zero = Jet::constant(0.0, E.num_vars(), ko);
    Jet m2[3][3] = {
        {zero, Ev * 0.5, Gu * 0.5},
        {Ev * 0.5, E, F},
        {Gu * 0.5, F, G},
    };
    Jet w2 = E * G - F * F;
    return (det3(m1) - det3(m2)) * reciprocal(w2 * w2);
}

} // namespace

GeometryJets geometry_jets(const ImmersionSpec& spec, double u, double v, int order) {
    if (order < 1 || order > Jet::max_order - 2) {
        throw ParameterError("geometry jet order must be 1 or 2");
    }
    GeometryJets g;
    g.pa = spec.pa;
    g.order = order;
    g.u = u;
    g.v = v;
    const ProductAmbient& pa = g.pa;
    const int m = order;
    const int xi = pa.xi_index();

    g.f = surface_jets(spec, u, v, m + 2);
    g.fu = jv_differentiated(g.f, 0);
    g.fv = jv_differentiated(g.f, 1);
    g.E = jv_inner(pa, g.fu, g.fu);
    g.F = jv_inner(pa, g.fu, g.fv);
    g.G = jv_inner(pa, g.fv, g.fv);
    g.W2 = g.E * g.G - g.F * g.F;
    if (g.W2.value() < 1e-10) throw RankError("immersion is degenerate at this point");

    // Ambient covariant hessian: flat second derivatives plus the space-form
    // correction c <f_a, f_b>_M f_M (exactly tangent to the product).
    JVec fM_m = jv_m_block(pa, jv_truncated(g.f, m));
    auto hess = [&](const JVec& da, const JVec& db, int a, int b) {
        JVec r = jv_differentiated(a == 0 ? g.fu : g.fv, b);
        if (pa.curved()) {
            Jet w = jv_inner_m(pa, jv_truncated(da, m), jv_truncated(db, m));
            jv_axpy(r, w * pa.c(), fM_m);
        }
        return r;
    };
    g.ddf[0][0] = hess(g.fu, g.fu, 0, 0);
    g.ddf[0][1] = hess(g.fu, g.fv, 0, 1);
    g.ddf[1][0] = g.ddf[0][1];
    g.ddf[1][1] = hess(g.fv, g.fv, 1, 1);

    // Decompose the vertical field: T = tangential part, N = xi - T.
    Jet iW2 = reciprocal(g.W2);
    Jet p = g.fu[xi], q = g.fv[xi]; // <xi, f_u>, <xi, f_v>
    Jet ta = (g.G * p - g.F * q) * iW2;
    Jet tb = (g.E * q - g.F * p) * iW2;
    g.T = jv_scale(g.fu, ta);
    jv_axpy(g.T, tb, g.fv);
    g.N = axis_jet(pa, xi, m + 1);
    g.N = jv_sub(g.N, g.T);
    Jet t2 = jv_inner(pa, g.T, g.T);
    g.abs_T = safe_sqrt(t2);
    g.abs_N = safe_sqrt(jv_inner(pa, g.N, g.N));

    // Oriented orthonormal tangent frame; e1 follows T when T is usable.
    if (t2.value() > 1e-12) {
        g.e1_along_T = true;
        Jet inv = reciprocal(g.abs_T);
        g.e1.ambient = jv_scale(g.T, inv);
        g.e1.a = ta * inv;
        g.e1.b = tb * inv;
    } else {
        Jet inv = reciprocal(safe_sqrt(g.E));
        g.e1.ambient = jv_scale(g.fu, inv);
        g.e1.a = inv;
        g.e1.b = Jet::constant(0.0, 2, m + 1);
    }
    auto orthogonalized = [&](const JVec& cand, const Jet& ca, const Jet& cb) {
        Jet d = jv_inner(pa, cand, g.e1.ambient);
        JVec w = cand;
        jv_axpy(w, d * -1.0, g.e1.ambient);
        return std::tuple<JVec, Jet, Jet, double>(
            w, ca - d * g.e1.a, cb - d * g.e1.b, jv_inner(pa, w, w).value());
    };
    Jet one = Jet::constant(1.0, 2, m + 1);
    Jet zero = Jet::constant(0.0, 2, m + 1);
    auto from_v = orthogonalized(g.fv, zero, one);
    auto from_u = orthogonalized(g.fu, one, zero);
    auto& pick = std::get<3>(from_v) >= std::get<3>(from_u) ? from_v : from_u;
    if (std::get<3>(pick) < 1e-12) throw RankError("immersion is degenerate at this point");
    {
        Jet inv = reciprocal(safe_sqrt(jv_inner(pa, std::get<0>(pick), std::get<0>(pick))));
        g.e2.ambient = jv_scale(std::get<0>(pick), inv);
        g.e2.a = std::get<1>(pick) * inv;
        g.e2.b = std::get<2>(pick) * inv;
    }
    double det = g.e1.a.value() * g.e2.b.value() - g.e2.a.value() * g.e1.b.value();
    if (det < 0.0) {
        g.e2.ambient = jv_scale(g.e2.ambient, -1.0);
        g.e2.a = -g.e2.a;
        g.e2.b = -g.e2.b;
    }

    // Orthonormal normal frame. Pivot axes are chosen at value level first
    // (preferring well-conditioned residuals), then the Gram-Schmidt is
    // replayed in jet arithmetic in that order.
    const int need = pa.sf.n - 1;
    JVec fM = jv_m_block(pa, jv_truncated(g.f, m + 1));
    Vec fM_vals = jv_values(fM);
    Vec e1_vals = jv_values(g.e1.ambient), e2_vals = jv_values(g.e2.ambient);
    std::vector<int> pivots;
    {
        std::vector<Vec> acc;
        auto project_values = [&](Vec w) {
            if (pa.curved()) {
                double s = inner_m(pa, w, fM_vals) * pa.c();
                for (int k = 0; k < pa.dim(); ++k) w[k] -= s * fM_vals[k];
            }
            double s1 = inner(pa, w, e1_vals), s2 = inner(pa, w, e2_vals);
            for (int k = 0; k < pa.dim(); ++k) w[k] -= s1 * e1_vals[k] + s2 * e2_vals[k];
            for (const Vec& a : acc) {
                double s = inner(pa, w, a);
                for (int k = 0; k < pa.dim(); ++k) w[k] -= s * a[k];
            }
            return w;
        };
        for (double threshold : {1e-2, 1e-10}) {
            for (int axis = 0; axis < pa.dim() && static_cast<int>(pivots.size()) < need; ++axis) {
                if (std::find(pivots.begin(), pivots.end(), axis) != pivots.end()) continue;
                Vec w(pa.dim(), 0.0);
                w[axis] = 1.0;
                w = project_values(w);
                double n2 = inner(pa, w, w);
                if (n2 > threshold) {
                    pivots.push_back(axis);
                    for (int k = 0; k < pa.dim(); ++k) w[k] /= std::sqrt(n2);
                    acc.push_back(w);
                }
            }
        }
        if (static_cast<int>(pivots.size()) < need) {
            throw RankError("cannot span the normal space of the surface");
        }
    }
    for (int axis : pivots) {
        JVec w = axis_jet(pa, axis, m + 1);
        if (pa.curved()) jv_axpy(w, jv_inner_m(pa, w, fM) * -pa.c(), fM);
        jv_axpy(w, jv_inner(pa, w, g.e1.ambient) * -1.0, g.e1.ambient);
        jv_axpy(w, jv_inner(pa, w, g.e2.ambient) * -1.0, g.e2.ambient);
        for (const JVec& nrm : g.normals) jv_axpy(w, jv_inner(pa, w, nrm) * -1.0, nrm);
        g.normals.push_back(jv_scale(w, reciprocal(safe_sqrt(jv_inner(pa, w, w)))));
    }

    // Second-order scalars in the frame.
    g.A.resize(g.normals.size());
    for (size_t al = 0; al < g.normals.size(); ++al) {
        JVec nm = jv_truncated(g.normals[al], m);
        g.A[al].m[0][0] = sff_component(g, 0, 0, nm);
        g.A[al].m[0][1] = sff_component(g, 0, 1, nm);
        g.A[al].m[1][0] = g.A[al].m[0][1];
        g.A[al].m[1][1] = sff_component(g, 1, 1, nm);
    }
    g.H = jv_zero(Jet::constant(0.0, 2, m), pa.dim());
    for (size_t al = 0; al < g.normals.size(); ++al) {
        Jet mean = (g.A[al].m[0][0] + g.A[al].m[1][1]) * 0.5;
        jv_axpy(g.H, mean, jv_truncated(g.normals[al], m));
    }
    g.abs_H = safe_sqrt(jv_inner(pa, g.H, g.H));
    JVec Nm = jv_truncated(g.N, m);
    g.HN = jv_inner(pa, g.H, Nm);
    g.A_N.m[0][0] = sff_component(g, 0, 0, Nm);
    g.A_N.m[0][1] = sff_component(g, 0, 1, Nm);
    g.A_N.m[1][0] = g.A_N.m[0][1];
    g.A_N.m[1][1] = sff_component(g, 1, 1, Nm);
    g.A_H.m[0][0] = sff_component(g, 0, 0, g.H);
    g.A_H.m[0][1] = sff_component(g, 0, 1, g.H);
    g.A_H.m[1][0] = g.A_H.m[0][1];
    g.A_H.m[1][1] = sff_component(g, 1, 1, g.H);
    g.lambda1 = g.A_H.m[0][0];
    g.K = brioschi(g);
    return g;
}

Vec second_fundamental(const GeometryJets& g, int i, int j) {
    Vec s(g.pa.dim(), 0.0);
    for (size_t al = 0; al < g.normals.size(); ++al) {
        double w = g.A[al].m[i][j].value();
        Vec n = jv_values(g.normals[al]);
        for (int k = 0; k < g.pa.dim(); ++k) s[k] += w * n[k];
    }
    return s;
}

double gauss_from_ambient(const GeometryJets& g) {
    Vec x = jv_values(g.e1.ambient), y = jv_values(g.e2.ambient);
    Vec rbar = curvature_raw(g.pa, x, y, y);
    double ambient_part = inner(g.pa, rbar, x);
    Vec s11 = second_fundamental(g, 0, 0);
    Vec s22 = second_fundamental(g, 1, 1);
    Vec s12 = second_fundamental(g, 0, 1);
    return ambient_part + inner(g.pa, s11, s22) - inner(g.pa, s12, s12);
}

double frame_scalar_derivative(const GeometryJets& g, int i, const Jet& scalar) {
    if (scalar.order() < 1) throw PreconditionError("scalar jet has no derivatives left");
    const FrameField& X = (i == 0) ? g.e1 : g.e2;
    return X.a.value() * scalar.partial(1, 0) + X.b.value() * scalar.partial(0, 1);
}

JVec frame_covariant(const GeometryJets& g, int i, const JVec& field) {
    int o = field[0].order();
    if (o < 1) throw PreconditionError("field jet has no derivatives left");
    const FrameField& X = (i == 0) ? g.e1 : g.e2;
    JVec du = jv_differentiated(field, 0);
    JVec dv = jv_differentiated(field, 1);
    JVec r = jv_scale(du, X.a.truncated(o - 1));
    jv_axpy(r, X.b.truncated(o - 1), dv);
    if (g.pa.curved()) {
        JVec xv = jv_truncated(X.ambient, o - 1);
        Jet w = jv_inner_m(g.pa, xv, jv_truncated(field, o - 1));
        jv_axpy(r, w * g.pa.c(), jv_m_block(g.pa, jv_truncated(g.f, o - 1)));
    }
    return r;
}

JVec normal_part(const GeometryJets& g, const JVec& w) {
    int o = w[0].order();
    JVec r = w;
    if (g.pa.curved()) {
        JVec fM = jv_m_block(g.pa, jv_truncated(g.f, o));
        jv_axpy(r, jv_inner_m(g.pa, r, fM) * -g.pa.c(), fM);
    }
    JVec t1 = jv_truncated(g.e1.ambient, o), t2 = jv_truncated(g.e2.ambient, o);
    jv_axpy(r, jv_inner(g.pa, r, t1) * -1.0, t1);
    jv_axpy(r, jv_inner(g.pa, r, t2) * -1.0, t2);
    return r;
}

Vec normal_part_values(const GeometryJets& g, const Vec& w) {
    Vec r = w;
    if (g.pa.curved()) {
        Vec fM = jv_values(jv_m_block(g.pa, g.f));
        double s = inner_m(g.pa, r, fM) * g.pa.c();
        for (int k = 0; k < g.pa.dim(); ++k) r[k] -= s * fM[k];
    }
    Vec t1 = jv_values(g.e1.ambient), t2 = jv_values(g.e2.ambient);
    double s1 = inner(g.pa, r, t1), s2 = inner(g.pa, r, t2);
    for (int k = 0; k < g.pa.dim(); ++k) r[k] -= s1 * t1[k] + s2 * t2[k];
    return r;
}

double normal_connection(const GeometryJets& g, int i, int alpha, int beta) {
    JVec d = frame_covariant(g, i, g.normals[alpha]);
    return jv_inner(g.pa, d, jv_truncated(g.normals[beta], d[0].order())).value();
}

double tangent_connection(const GeometryJets& g, int i, int j, int k) {
    JVec d = frame_covariant(g, i, (j == 0 ? g.e1 : g.e2).ambient);
    const JVec& ek = (k == 0 ? g.e1 : g.e2).ambient;
    return jv_inner(g.pa, d, jv_truncated(ek, d[0].order())).value();
}

AdaptedNormalFrame adapted_normal_frame(const GeometryJets& g) {
    AdaptedNormalFrame out;
    const int dim = g.pa.dim();
    auto dot = [&](const Vec& a, const Vec& b) { return inner(g.pa, a, b); };
    std::vector<Vec> raw_normals;
    for (const JVec& n : g.normals) raw_normals.push_back(jv_values(n));
    auto to_normal_space = [&](const Vec& w) {
        Vec r(raw_normals.size(), 0.0);
        for (size_t a = 0; a < raw_normals.size(); ++a) r[a] = dot(w, raw_normals[a]);
        return r;
    };
    if (g.abs_H.value() <= 1e-8) return out;
    out.ok = true;
    std::vector<Vec> coords; // adapted normals, in generic-frame coordinates
    Vec h = to_normal_space(jv_values(g.H));
    double hn = std::sqrt(std::max(vdot(h, h), 0.0));
    coords.push_back(vscale(h, 1.0 / hn));
    Vec nv = to_normal_space(jv_values(g.N));
    {
        Vec w = nv;
        vaxpy(w, -vdot(w, coords[0]), coords[0]);
        double n2 = vdot(w, w);
        if (n2 > 1e-16) {
            coords.push_back(vscale(w, 1.0 / std::sqrt(n2)));
            out.second_is_vertical = true;
        }
    }
    for (size_t a = 0; a < raw_normals.size() && coords.size() < raw_normals.size(); ++a) {
        Vec w(raw_normals.size(), 0.0);
        w[a] = 1.0;
        for (const Vec& c : coords) vaxpy(w, -vdot(w, c), c);
        double n2 = vdot(w, w);
        if (n2 > 1e-10) coords.push_back(vscale(w, 1.0 / std::sqrt(n2)));
    }
    for (const Vec& cvec : coords) {
        Vec amb(dim, 0.0);
        Mat2 shape = Mat2::diag(0.0, 0.0);
        for (size_t a = 0; a < raw_normals.size(); ++a) {
            vaxpy(amb, cvec[a], raw_normals[a]);
            shape = shape + g.A[a].values().scaled(cvec[a]);
        }
        out.normals.push_back(amb);
        out.shape.push_back(shape);
    }
    return out;
}

} // namespace helix
