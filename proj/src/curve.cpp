#include "helix/curve.hpp"

#include <algorithm>
#include <cmath>

namespace helix {

namespace {

constexpr double kFrenetTol = 1e-7;
constexpr double kUnitSpeedTol = 1e-6;

void check_on_spaceform(const ProductAmbient& pa, const Vec& p) {
    if (manifold_residual(pa, p) > 1e-9)
        throw PreconditionError("circle base point is not on the manifold");
}

void check_spaceform_tangent(const ProductAmbient& pa, const Vec& p, const Vec& u,
                             const char* name) {
    if (std::abs(u[pa.xi_index()]) > 1e-12)
        throw PreconditionError(std::string(name) + " must be tangent to the space-form factor");
    if (pa.curved() && std::abs(inner_m(pa, p, u)) > 1e-9)
        throw PreconditionError(std::string(name) + " is not tangent to the space form at p");
    if (std::abs(inner(pa, u, u) - 1.0) > 1e-9)
        throw PreconditionError(std::string(name) + " is not a unit vector");
}

} // namespace

CurveSpec spaceform_circle(const SpaceForm& sf, const AmbientPoint& p,
                           const AmbientVector& u1, const AmbientVector& u2,
                           double kappa) {
    ProductAmbient pa{sf};
    if (kappa < 0.0) throw ParameterError("circle curvature must be >= 0");
    const Vec pc = p.coords;
    if (static_cast<int>(pc.size()) != pa.dim())
        throw ShapeError("circle base point has wrong dimension");
    check_on_spaceform(pa, pc);
    check_spaceform_tangent(pa, pc, u1.coords, "u1");
    check_spaceform_tangent(pa, pc, u2.coords, "u2");
    if (std::abs(inner(pa, u1.coords, u2.coords)) > 1e-9)
        throw PreconditionError("u1 and u2 must be orthogonal");

    const double c = sf.c;
    const double t0 = pc[pa.xi_index()];
    const int d = pa.dim();

    if (sf.model == Model::Hyperboloid && kappa * kappa <= std::abs(c) + 1e-12)
        throw UnsupportedCurveError(
            "no closed circle of curvature " + std::to_string(kappa) +
            " in a hyperbolic plane of curvature " + std::to_string(c) +
            " (horocycles and equidistants are not supported)");

    if (sf.model == Model::Flat && kappa == 0.0) {
        // Straight line.
        Vec base = pc, dir = u1.coords;
        CurveSpec spec;
        spec.pa = pa;
        spec.kind = "geodesic-line";
        spec.eval = [pa, base, dir, d](double s, int order) {
            Jet sj = Jet::variable(s, 0, 1, order);
            JVec r = jv_from_values(base, 1, order);
            for (int i = 0; i < d; ++i) r[i] += sj * dir[i];
            return r;
        };
        return spec;
    }

    // gamma(s) = center + R (cos(s/R) e1 + sin(s/R) e2) in the space-form
    // block, with e2 = u1, e1 = R (c p_M - kappa u2), all unit and mutually
    // orthogonal, so the curve is unit speed and has constant geodesic
    // curvature kappa.
    const double R = 1.0 / std::sqrt(kappa * kappa + c);
    Vec e2 = m_block(pa, u1.coords);
    Vec e1 = m_block(pa, vsub(vscale(pc, c), vscale(u2.coords, kappa)));
    e1 = vscale(e1, R);
    Vec center = vsub(m_block(pa, pc), vscale(e1, R));

    CurveSpec spec;
    spec.pa = pa;
    spec.kind = "spaceform-circle";
    spec.eval = [pa, center, e1, e2, R, t0, d](double s, int order) {
        Jet sj = Jet::variable(s, 0, 1, order);
        Jet ph = sj * (1.0 / R);
        Jet cph = cos(ph), sph = sin(ph);
        JVec r = jv_from_values(center, 1, order);
        for (int i = 0; i < d; ++i) r[i] += (cph * e1[i] + sph * e2[i]) * R;
        r[pa.xi_index()] = Jet::constant(t0, 1, order);
        return r;
    };
    return spec;
}

CurveSpec spaceform_circle_canonical(const SpaceForm& sf, double kappa) {
    ProductAmbient pa{sf};
    const int d = pa.dim();
    Vec p(d, 0.0);
    Vec u1(d, 0.0), u2(d, 0.0);
    if (sf.model == Model::Flat) {
        u1[0] = 1.0;
        u2[1] = 1.0;
    } else {
        p[0] = sf.radius();
        u1[1] = 1.0;
        u2[2] = 1.0;
    }
    AmbientPoint base{p};
    return spaceform_circle(sf, base, {u1, base}, {u2, base}, kappa);
}

CurveSpec vertical_line(const ProductAmbient& pa, const AmbientPoint& p) {
    if (manifold_residual(pa, p.coords) > 1e-9)
        throw PreconditionError("vertical line base point is not on the manifold");
    const Vec base = p.coords;
    const int k = pa.xi_index();
    CurveSpec spec;
    spec.pa = pa;
    spec.kind = "vertical-line";
    spec.eval = [base, k](double s, int order) {
        JVec r = jv_from_values(base, 1, order);
        r[k] = Jet::variable(base[k] + s, 0, 1, order);
        return r;
    };
    return spec;
}

CurveSpec latitude_circle(const SpaceForm& sf, double phi) {
    if (sf.model != Model::Sphere)
        throw ParameterError("latitude circles need a spherical factor (c > 0)");
    if (phi <= 0.0 || phi >= 3.141592653589793)
        throw ParameterError("latitude polar angle must lie in (0, pi)");
    ProductAmbient pa{sf};
    const double r = sf.radius();
    const double rho = r * std::sin(phi); // model-space circle radius
    const double z = r * std::cos(phi);
    const int d = pa.dim();
    CurveSpec spec;
    spec.pa = pa;
    spec.kind = "latitude-circle";
    spec.eval = [rho, z, d](double s, int order) {
        Jet sj = Jet::variable(s, 0, 1, order);
        Jet ph = sj * (1.0 / rho);
        JVec out(d, Jet::constant(0.0, 1, order));
        out[0] = cos(ph) * rho;
        out[1] = sin(ph) * rho;
        out[2] = Jet::constant(z, 1, order);
        return out;
    };
    return spec;
}

namespace {

// State of the prescribed-curvature integrator: position and velocity in the
// 3-dimensional model block of S^2(c); the vertical coordinate stays zero.
template <class S>
struct PlaneCurveState {
    std::array<S, 3> p, v;
};

// J v = sqrt(c) p x v rotates a tangent vector by +pi/2 in T S^2(c).
template <class S>
std::array<S, 3> sphere_rotate(const std::array<S, 3>& p, const std::array<S, 3>& v,
                               double sqrt_c) {
    return {(p[1] * v[2] - p[2] * v[1]) * sqrt_c,
            (p[2] * v[0] - p[0] * v[2]) * sqrt_c,
            (p[0] * v[1] - p[1] * v[0]) * sqrt_c};
}

template <class S>
PlaneCurveState<S> prescribed_rhs(const PlaneCurveState<S>& x, const S& kappa, double c,
                                  double sqrt_c) {
    // Flat acceleration of a unit-speed spherical curve with geodesic
    // curvature kappa: gamma'' = kappa J gamma' - c gamma.
    auto jv = sphere_rotate(x.p, x.v, sqrt_c);
    PlaneCurveState<S> r;
    for (int i = 0; i < 3; ++i) {
        r.p[i] = x.v[i];
        r.v[i] = jv[i] * kappa - x.p[i] * c;
    }
    return r;
}

PlaneCurveState<double> prescribed_flow(double c, double kappa0, double amp, double freq,
                                        double s_target) {
    const double sqrt_c = std::sqrt(c);
    const double r = 1.0 / sqrt_c;
    PlaneCurveState<double> x{{r, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    const double h_max = 0.005;
    const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(s_target) / h_max)));
    const double h = s_target / static_cast<double>(steps);
    double s = 0.0;
    auto rhs = [&](const PlaneCurveState<double>& y, double at) {
        const double kappa = kappa0 + amp * std::sin(freq * at);
        return prescribed_rhs(y, kappa, c, sqrt_c);
    };
    for (long i = 0; i < steps; ++i) {
        auto add = [](const PlaneCurveState<double>& a, const PlaneCurveState<double>& b,
                      double w) {
            PlaneCurveState<double> r2;
            for (int k = 0; k < 3; ++k) {
                r2.p[k] = a.p[k] + w * b.p[k];
                r2.v[k] = a.v[k] + w * b.v[k];
            }
            return r2;
        };
        auto k1 = rhs(x, s);
        auto k2 = rhs(add(x, k1, h / 2), s + h / 2);
        auto k3 = rhs(add(x, k2, h / 2), s + h / 2);
        auto k4 = rhs(add(x, k3, h), s + h);
        for (int k = 0; k < 3; ++k) {
            x.p[k] += h / 6 * (k1.p[k] + 2 * k2.p[k] + 2 * k3.p[k] + k4.p[k]);
            x.v[k] += h / 6 * (k1.v[k] + 2 * k2.v[k] + 2 * k3.v[k] + k4.v[k]);
        }
        s += h;
    }
    return x;
}

} // namespace

CurveSpec prescribed_curvature_curve(const SpaceForm& sf, double kappa0, double amplitude,
                                     double frequency) {
    if (sf.model != Model::Sphere)
        throw ParameterError("prescribed-curvature curves are built on a spherical factor");
    if (sf.n != 2) throw ParameterError("prescribed-curvature curves live in M^2(c)");
    const double c = sf.c;
    ProductAmbient pa{sf};
    const int d = pa.dim();
    CurveSpec spec;
    spec.pa = pa;
    spec.kind = "prescribed-curvature";
    spec.eval = [c, kappa0, amplitude, frequency, d](double s, int order) {
        const double sqrt_c = std::sqrt(c);
        auto x = prescribed_flow(c, kappa0, amplitude, frequency, s);
        // Taylor recurrence: fill jet coefficients one order at a time from
        // the ODE right-hand side evaluated in jet arithmetic.
        PlaneCurveState<Jet> j;
        for (int i = 0; i < 3; ++i) {
            j.p[i] = Jet::constant(x.p[i], 1, order);
            j.v[i] = Jet::constant(x.v[i], 1, order);
        }
        Jet sj = Jet::variable(s, 0, 1, order);
        for (int k = 0; k < order; ++k) {
            Jet kappa = sin(sj * frequency) * amplitude + kappa0;
            auto g = prescribed_rhs(j, kappa, c, sqrt_c);
            for (int i = 0; i < 3; ++i) {
                j.p[i].at(k + 1) = g.p[i].coeff(k) / (k + 1);
                j.v[i].at(k + 1) = g.v[i].coeff(k) / (k + 1);
            }
        }
        JVec out(d, Jet::constant(0.0, 1, order));
        for (int i = 0; i < 3; ++i) out[i] = j.p[i];
        return out;
    };
    return spec;
}

std::vector<Vec> covariant_jets(const CurveSpec& curve, double s, int k) {
    if (k < 0 || k > 3) throw ParameterError("covariant jet depth must be in [0, 3]");
    if (!curve.arc_length)
        throw PreconditionError("curve is not flagged as arc-length parametrized");
    const ProductAmbient& pa = curve.pa;
    JVec coords = curve.eval(s, k + 1);
    if (static_cast<int>(coords.size()) != pa.dim())
        throw ShapeError("curve evaluation returned wrong coordinate count");

    JVec vel = jv_differentiated(coords, 0); // order k
    const double speed_sq = inner(pa, jv_values(vel), jv_values(vel));
    if (std::abs(speed_sq - 1.0) > kUnitSpeedTol)
        throw PreconditionError("curve is not unit speed at s=" + std::to_string(s) +
                                " (|gamma'|^2 = " + std::to_string(speed_sq) + ")");

    std::vector<Vec> out;
    out.push_back(jv_values(vel));
    JVec current = vel; // order k - (j-1)
    for (int j = 1; j <= k; ++j) {
        const int ord = k - j;
        JVec dcur = jv_differentiated(current, 0);
        JVec next = dcur;
        if (pa.curved()) {
            Jet w = jv_inner_m(pa, jv_truncated(vel, ord), jv_truncated(current, ord));
            jv_axpy(next, w * pa.c(), jv_m_block(pa, jv_truncated(coords, ord)));
        }
        out.push_back(jv_values(next));
        current = next;
    }
    return out;
}

FrenetData frenet_apparatus(const CurveSpec& curve, double s, int r_max) {
    r_max = std::clamp(r_max, 1, 4);
    auto derivs = covariant_jets(curve, s, r_max - 1);
    const ProductAmbient& pa = curve.pa;

    FrenetData fd;
    double kappa_product = 1.0;
    for (int i = 0; i < static_cast<int>(derivs.size()); ++i) {
        Vec y = derivs[i];
        for (const Vec& x : fd.frame) vaxpy(y, -inner(pa, derivs[i], x), x);
        const double norm_sq = inner(pa, y, y);
        // Roundoff can push an exhausted residual slightly negative in the
        // hyperboloid signature; only genuinely timelike directions are bad.
        if (norm_sq < -1e-10 * std::max(1.0, vdot(y, y)))
            throw PreconditionError("degenerate (non-spacelike) Frenet direction");
        const double norm = std::sqrt(std::max(norm_sq, 0.0));
        if (i == 0) {
            fd.frame.push_back(vscale(y, 1.0 / norm));
            continue;
        }
        const double kappa = norm / kappa_product;
        if (kappa <= kFrenetTol) break;
        fd.curvatures.push_back(kappa);
        fd.frame.push_back(vscale(y, 1.0 / norm));
        kappa_product *= kappa;
    }
    fd.osculating_order = static_cast<int>(fd.frame.size());
    return fd;
}

std::string to_string(CurveClass c, int order) {
    switch (c) {
        case CurveClass::Geodesic: return "geodesic";
        case CurveClass::Circle: return "circle";
        case CurveClass::Helix: return "helix";
        case CurveClass::Frenet: return "frenet(" + std::to_string(order) + ")";
        case CurveClass::NonConstantCurvature: return "non-constant-curvature";
    }
    return "?";
}

CurveClassification classify_curve(const CurveSpec& curve, int samples) {
    if (samples < 2) throw ParameterError("curve classification needs at least 2 samples");
    const double a = curve.range[0], b = curve.range[1];
    size_t max_len = 0;
    std::vector<std::vector<double>> all;
    for (int i = 0; i < samples; ++i) {
        const double s = a + (b - a) * (i + 0.5) / samples;
        auto fd = frenet_apparatus(curve, s, 4);
        all.push_back(fd.curvatures);
        max_len = std::max(max_len, fd.curvatures.size());
    }

    CurveClassification out;
    out.curvature_mean.assign(max_len, 0.0);
    out.curvature_spread.assign(max_len, 0.0);
    for (size_t j = 0; j < max_len; ++j) {
        double lo = 1e300, hi = -1e300, sum = 0.0;
        for (auto& ks : all) {
            const double v = j < ks.size() ? ks[j] : 0.0;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        out.curvature_mean[j] = sum / samples;
        out.curvature_spread[j] = hi - lo;
    }

    bool constant = true;
    for (size_t j = 0; j < max_len; ++j)
        if (out.curvature_spread[j] > 1e-6 * (1.0 + out.curvature_mean[j])) constant = false;

    out.osculating_order = static_cast<int>(max_len) + 1;
    if (!constant) {
        out.label = CurveClass::NonConstantCurvature;
    } else if (out.osculating_order == 1) {
        out.label = CurveClass::Geodesic;
    } else if (out.osculating_order == 2) {
        out.label = CurveClass::Circle;
    } else if (out.osculating_order == 3) {
        out.label = CurveClass::Helix;
    } else {
        out.label = CurveClass::Frenet;
    }
    return out;
}

} // namespace helix
