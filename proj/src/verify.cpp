#include "helix/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "helix/surface_geometry.hpp"

namespace helix {

namespace {

// Probes whose angle function sits closer than this to 0 or 1 are excluded
// from the derivative identities, which divide by |T| and degenerate with
// |N|; the bound is far above the helix tolerance, so a genuine constant
// angle is never partially masked.
constexpr double kAngleFloor = 1e-3;

// Thresholds the classifier reads as "equal to zero", before scaling.
constexpr double kMinimalTol = 1e-8;
constexpr double kUmbilicTol = 1e-6;
constexpr double kCaseTol = 1e-5;

struct ResidualAccum {
    double worst = 0.0;
    double sum = 0.0;
    long count = 0;

    void add(double r) {
        r = std::abs(r);
        worst = std::max(worst, r);
        sum += r;
        ++count;
    }
    CheckResult result(double tol) const {
        CheckResult out;
        out.tol = tol;
        if (count == 0) {
            out.applicable = false;
            return out;
        }
        out.max = worst;
        out.mean = sum / static_cast<double>(count);
        out.pass = worst <= tol;
        return out;
    }
};

struct ScalarAccum {
    double sum = 0.0, sumsq = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    long count = 0;

    void add(double x) {
        sum += x;
        sumsq += x * x;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        ++count;
    }
    ScalarStats stats() const {
        ScalarStats s;
        if (count == 0) return s;
        s.mean = sum / static_cast<double>(count);
        s.stddev = std::sqrt(std::max(0.0, sumsq / static_cast<double>(count) - s.mean * s.mean));
        s.min = lo;
        s.max = hi;
        return s;
    }
};

double ambient_norm(const ProductAmbient& pa, const Vec& v) {
    return std::sqrt(std::max(0.0, inner(pa, v, v)));
}

// sigma(e_j, e_k) as an ambient jet field: the covariant position hessian
// contracted with the frame components, projected off the tangent plane.
JVec sigma_field(const GeometryJets& g, int j, int k) {
    const FrameField& X = (j == 0) ? g.e1 : g.e2;
    const FrameField& Y = (k == 0) ? g.e1 : g.e2;
    const int o = g.order;
    Jet xa = X.a.truncated(o), xb = X.b.truncated(o);
    Jet ya = Y.a.truncated(o), yb = Y.b.truncated(o);
    JVec w = jv_scale(g.ddf[0][0], xa * ya);
    jv_axpy(w, xa * yb + xb * ya, g.ddf[0][1]);
    jv_axpy(w, xb * yb, g.ddf[1][1]);
    return normal_part(g, w);
}

double pmc_residual(const GeometryJets& g) {
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
        Vec d = jv_values(frame_covariant(g, i, g.H));
        worst = std::max(worst, ambient_norm(g.pa, normal_part_values(g, d)));
    }
    return worst;
}

double gauss_residual(const GeometryJets& g) { return std::abs(g.K.value() - gauss_from_ambient(g)); }

double codazzi_residual(const GeometryJets& g) {
    const int nn = static_cast<int>(g.normals.size());
    double Gam[2][2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int l = 0; l < 2; ++l) Gam[i][j][l] = tangent_connection(g, i, j, l);

    JVec sig[2][2] = {{sigma_field(g, 0, 0), sigma_field(g, 0, 1)}, {JVec{}, sigma_field(g, 1, 1)}};
    sig[1][0] = sig[0][1];

    // <(nabla^perp_{e_i} sigma)(e_j, e_k), N_beta> for all beta at once.
    auto covariant_sigma = [&](int i, int j, int k, std::vector<double>& out) {
        JVec d = frame_covariant(g, i, sig[j][k]);
        const int o = d[0].order();
        for (int be = 0; be < nn; ++be) {
            double t = jv_inner(g.pa, d, jv_truncated(g.normals[be], o)).value();
            for (int l = 0; l < 2; ++l)
                t -= Gam[i][j][l] * g.A[be].m[l][k].value() + Gam[i][k][l] * g.A[be].m[j][l].value();
            out[be] = t;
        }
    };

    Vec x = jv_values(g.e1.ambient), y = jv_values(g.e2.ambient);
    std::vector<double> lhs(nn), d12(nn), d21(nn);
    double worst = 0.0;
    for (int z = 0; z < 2; ++z) {
        Vec rbar = curvature_raw(g.pa, x, y, z == 0 ? x : y);
        covariant_sigma(0, 1, z, d12);
        covariant_sigma(1, 0, z, d21);
        for (int be = 0; be < nn; ++be) {
            double ambient = inner(g.pa, rbar, jv_values(g.normals[be]));
            worst = std::max(worst, std::abs(ambient - (d12[be] - d21[be])));
        }
    }
    return worst;
}

double ricci_residual(const GeometryJets& g) {
    const int nn = static_cast<int>(g.normals.size());
    if (nn < 2) return 0.0; // one normal: both sides vanish identically
    double tors[2];
    for (int l = 0; l < 2; ++l)
        tors[l] = tangent_connection(g, 0, 1, l) - tangent_connection(g, 1, 0, l);

    Vec x = jv_values(g.e1.ambient), y = jv_values(g.e2.ambient);
    double worst = 0.0;
    for (int al = 0; al < nn; ++al) {
        JVec w1 = normal_part(g, frame_covariant(g, 1, g.normals[al]));
        JVec w0 = normal_part(g, frame_covariant(g, 0, g.normals[al]));
        JVec d01 = frame_covariant(g, 0, w1);
        JVec d10 = frame_covariant(g, 1, w0);
        const int o = d01[0].order();
        Vec rbar = curvature_raw(g.pa, x, y, jv_values(g.normals[al]));
        for (int be = 0; be < nn; ++be) {
            if (be == al) continue;
            double lhs = jv_inner(g.pa, d01, jv_truncated(g.normals[be], o)).value() -
                         jv_inner(g.pa, d10, jv_truncated(g.normals[be], o)).value();
            for (int l = 0; l < 2; ++l) lhs -= tors[l] * normal_connection(g, l, al, be);
            Mat2 bracket = g.A[al].values() * g.A[be].values() - g.A[be].values() * g.A[al].values();
            double rhs = inner(g.pa, rbar, jv_values(g.normals[be])) + bracket.m[1][0];
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

} // namespace

double Tolerances::apply(double base) const {
    if (scale < 1.0) throw ParameterError("tolerance scale must be >= 1 (overrides only loosen)");
    return base * scale;
}

double Tolerances::structure(const std::string& kind) const {
    if (kind == "case4" || kind == "case5" || kind == "frame_flow" || kind == "grid")
        return apply(reconstructed);
    return apply(closed);
}

double ScalarStats::magnitude() const { return std::max(std::abs(min), std::abs(max)); }

const CheckResult* ResidualReport::find_check(const std::string& name) const {
    for (const auto& [key, value] : checks)
        if (key == name) return &value;
    return nullptr;
}

const ScalarStats* ResidualReport::find_scalar(const std::string& name) const {
    for (const auto& [key, value] : scalars)
        if (key == name) return &value;
    return nullptr;
}

const CheckResult& ResidualReport::check(const std::string& name) const {
    const CheckResult* r = find_check(name);
    if (!r) throw ParameterError("report has no check named " + name);
    return *r;
}

const ScalarStats& ResidualReport::scalar(const std::string& name) const {
    const ScalarStats* s = find_scalar(name);
    if (!s) throw ParameterError("report has no scalar named " + name);
    return *s;
}

bool ResidualReport::all_pass() const {
    for (const auto& [name, result] : checks) {
        if (name == "pseudo_umbilical" || name == "ar_form") continue;
        if (result.applicable && !result.pass) return false;
    }
    return true;
}

nlohmann::ordered_json ResidualReport::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = kind;
    j["ambient"] = {{"c", c}, {"n", n}};
    j["grid"] = {{"nu", nu}, {"nv", nv}};
    nlohmann::ordered_json jc;
    for (const auto& [name, r] : checks) {
        jc[name] = {{"max", r.max},
                    {"mean", r.mean},
                    {"tol", r.tol},
                    {"pass", r.pass},
                    {"applicable", r.applicable}};
    }
    j["checks"] = jc;
    nlohmann::ordered_json js;
    for (const auto& [name, s] : scalars)
        js[name] = {{"mean", s.mean}, {"std", s.stddev}, {"min", s.min}, {"max", s.max}};
    j["scalars"] = js;
    return j;
}

ResidualReport run_checks(const ImmersionSpec& spec, int nu, int nv, const Tolerances& tol) {
    if (nu < 2 || nv < 2) throw ParameterError("probe grid needs at least 2 x 2 points");
    if (tol.scale < 1.0) throw ParameterError("tolerance scale must be >= 1 (overrides only loosen)");

    ResidualAccum pmc, gauss, codazzi, ricci, pseudo;
    ResidualAccum lambda1_grad, hn_grad, k_ident, k_grad, balance, ar;
    ScalarAccum s_abs_t, s_abs_h, s_k, s_lambda1, s_hn, s_combo, s_beta, s_lambda;
    double t_lo = std::numeric_limits<double>::infinity(), t_hi = -t_lo;
    double t_dev_sum = 0.0;

    const double c = spec.pa.c();
    const bool ar_applicable = spec.pa.sf.n == 2;
    const int xi = spec.pa.xi_index();

    std::vector<double> t_values;
    t_values.reserve(static_cast<size_t>(nu) * nv);

    for (int i = 0; i < nu; ++i) {
        double u = spec.u_range[0] + (i + 0.5) * (spec.u_range[1] - spec.u_range[0]) / nu;
        for (int j = 0; j < nv; ++j) {
            double v = spec.v_range[0] + (j + 0.5) * (spec.v_range[1] - spec.v_range[0]) / nv;
            GeometryJets g = geometry_jets(spec, u, v, 2);

            const double abs_t = g.abs_T.value();
            const double abs_n = g.abs_N.value();
            const double abs_h = g.abs_H.value();
            const double kval = g.K.value();
            const double l1 = g.lambda1.value();
            const double hn = g.HN.value();

            t_values.push_back(abs_t);
            t_lo = std::min(t_lo, abs_t);
            t_hi = std::max(t_hi, abs_t);
            s_abs_t.add(abs_t);
            s_abs_h.add(abs_h);
            s_k.add(kval);
            s_lambda1.add(l1);
            s_hn.add(hn);
            s_combo.add(4.0 * abs_h * abs_h + c * abs_t * abs_t);
            if (abs_h > 1e-8 && abs_n > 1e-8)
                s_beta.add(std::acos(std::clamp(hn / (abs_h * abs_n), -1.0, 1.0)));

            pmc.add(pmc_residual(g));
            gauss.add(gauss_residual(g));
            codazzi.add(codazzi_residual(g));
            ricci.add(ricci_residual(g));
            pseudo.add(eigen_spread(g.A_H.values()));

            AdaptedNormalFrame adapted = adapted_normal_frame(g);
            if (adapted.ok && adapted.second_is_vertical && adapted.normals.size() >= 3)
                s_lambda.add(0.5 * eigen_spread(adapted.shape[2]));

            if (abs_t > kAngleFloor && abs_n > kAngleFloor) {
                const double combo = 4.0 * abs_h * abs_h + c * abs_t * abs_t;
                double e1_l1 = frame_scalar_derivative(g, 0, g.lambda1);
                double e2_l1 = frame_scalar_derivative(g, 1, g.lambda1);
                lambda1_grad.add(std::max(std::abs(e1_l1 - hn / abs_t * (combo - 4.0 * l1)),
                                          std::abs(e2_l1)));
                double e1_hn = frame_scalar_derivative(g, 0, g.HN);
                double e2_hn = frame_scalar_derivative(g, 1, g.HN);
                hn_grad.add(std::max(std::abs(e1_hn + abs_t * l1), std::abs(e2_hn)));
                k_ident.add(kval - 2.0 * l1 + 4.0 * hn * hn / (abs_t * abs_t));
                double e1_k = frame_scalar_derivative(g, 0, g.K);
                double e2_k = frame_scalar_derivative(g, 1, g.K);
                k_grad.add(std::max(std::abs(e1_k - 2.0 * hn / (abs_t * abs_t) * combo),
                                    std::abs(e2_k)));
                double an_sq = 0.0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) an_sq += g.A_N.m[a][b].value() * g.A_N.m[a][b].value();
                balance.add(an_sq + kval * abs_t * abs_t - 2.0 * abs_t * abs_t * l1);
            }

            if (ar_applicable) {
                double t1 = g.e1.ambient[xi].value(), t2 = g.e2.ambient[xi].value();
                double q11 = 2.0 * g.A_H.m[0][0].value() - c * t1 * t1;
                double q22 = 2.0 * g.A_H.m[1][1].value() - c * t2 * t2;
                double q12 = 2.0 * g.A_H.m[0][1].value() - c * t1 * t2;
                ar.add(std::max(std::abs(q11 - q22), std::abs(q12)));
            }
        }
    }

    const double t_mean = s_abs_t.stats().mean;
    for (double t : t_values) t_dev_sum += std::abs(t - t_mean);

    ResidualReport report;
    report.kind = spec.kind;
    report.c = c;
    report.n = spec.pa.sf.n;
    report.nu = nu;
    report.nv = nv;

    const double struct_tol = tol.structure(spec.kind);
    const double ident_tol = tol.apply(tol.reconstructed);

    CheckResult helix;
    helix.max = t_hi - t_lo;
    helix.mean = t_dev_sum / static_cast<double>(t_values.size());
    helix.tol = tol.apply(tol.angle);
    helix.pass = helix.max <= helix.tol;
    report.checks.emplace_back("helix", helix);
    report.checks.emplace_back("pmc", pmc.result(struct_tol));
    report.checks.emplace_back("gauss_equation", gauss.result(struct_tol));
    report.checks.emplace_back("codazzi_equation", codazzi.result(struct_tol));
    report.checks.emplace_back("ricci_equation", ricci.result(struct_tol));
    report.checks.emplace_back("pseudo_umbilical", pseudo.result(tol.apply(kUmbilicTol)));
    report.checks.emplace_back("lambda1_gradient", lambda1_grad.result(ident_tol));
    report.checks.emplace_back("hn_gradient", hn_grad.result(ident_tol));
    report.checks.emplace_back("k_identity", k_ident.result(ident_tol));
    report.checks.emplace_back("k_gradient", k_grad.result(ident_tol));
    report.checks.emplace_back("trace_balance", balance.result(ident_tol));
    CheckResult ar_check = ar.result(struct_tol);
    if (!ar_applicable) ar_check.applicable = false;
    report.checks.emplace_back("ar_form", ar_check);

    report.scalars.emplace_back("abs_T", s_abs_t.stats());
    report.scalars.emplace_back("abs_H", s_abs_h.stats());
    report.scalars.emplace_back("K", s_k.stats());
    report.scalars.emplace_back("lambda1", s_lambda1.stats());
    report.scalars.emplace_back("HN", s_hn.stats());
    report.scalars.emplace_back("case4_combination", s_combo.stats());
    if (s_beta.count > 0) report.scalars.emplace_back("beta", s_beta.stats());
    if (s_lambda.count > 0) report.scalars.emplace_back("lambda", s_lambda.stats());
    return report;
}

namespace {

// Dimension of the span of {sigma(e1,e1), sigma(e1,e2), sigma(e2,e2)} and the
// umbilicity evidence for the horizontal branches, probed on a coarse lattice.
void horizontal_diagnostics(const ImmersionSpec& spec, nlohmann::ordered_json& diag) {
    int dim = 0;
    double height_lo = std::numeric_limits<double>::infinity(), height_hi = -height_lo;
    const int xi = spec.pa.xi_index();
    for (int i = 0; i < 5; ++i) {
        double u = spec.u_range[0] + (i + 0.5) * (spec.u_range[1] - spec.u_range[0]) / 5;
        for (int j = 0; j < 5; ++j) {
            double v = spec.v_range[0] + (j + 0.5) * (spec.v_range[1] - spec.v_range[0]) / 5;
            GeometryJets g = geometry_jets(spec, u, v, 2);
            Vec s[3] = {second_fundamental(g, 0, 0), second_fundamental(g, 0, 1),
                        second_fundamental(g, 1, 1)};
            std::array<std::array<double, 3>, 3> gram{};
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) gram[a][b] = inner(g.pa, s[a], s[b]);
            auto ev = sym_eigenvalues3(gram);
            double floor = std::max(1e-12, 1e-8 * std::abs(ev[2]));
            int d = 0;
            for (double e : ev)
                if (e > floor) ++d;
            dim = std::max(dim, d);
            double h = jv_values(g.f)[xi];
            height_lo = std::min(height_lo, h);
            height_hi = std::max(height_hi, h);
        }
    }
    diag["first_normal_dimension"] = dim;
    diag["sub_ambient_dimension"] = 2 + dim;
    diag["slice_height_spread"] = height_hi - height_lo;
}

} // namespace

Classification classify_surface(const ImmersionSpec& spec, const ResidualReport& report,
                                const Tolerances& tol) {
    Classification out;
    nlohmann::ordered_json& diag = out.diagnostics;

    const CheckResult& helix = report.check("helix");
    const CheckResult& pmc = report.check("pmc");
    if (!helix.pass || !pmc.pass) {
        out.label = "not-pmc-helix";
        diag["helix_spread"] = helix.max;
        diag["helix_pass"] = helix.pass;
        diag["pmc_residual"] = pmc.max;
        diag["pmc_pass"] = pmc.pass;
        return out;
    }

    const double abs_h = report.scalar("abs_H").mean;
    if (abs_h <= tol.apply(kMinimalTol)) {
        out.label = "minimal";
        diag["abs_H"] = abs_h;
        return out;
    }

    const CheckResult& pseudo = report.check("pseudo_umbilical");
    if (pseudo.pass) {
        out.label = "pseudo-umbilical";
        diag["umbilicity_defect"] = pseudo.max;
        diag["abs_H"] = abs_h;
        return out;
    }

    const double abs_t = report.scalar("abs_T").mean;
    const double angle_tol = tol.apply(tol.angle);
    if (abs_t <= angle_tol) {
        // Horizontal: a surface inside one slice of the product. The split
        // asks whether the direction of H is umbilical for the surface, the
        // observable trace of sitting minimally in an umbilical hypersurface.
        double unit_defect = pseudo.max / abs_h;
        out.label = unit_defect <= tol.apply(kUmbilicTol) ? "case1" : "case2";
        diag["abs_T"] = abs_t;
        diag["unit_umbilicity_defect"] = unit_defect;
        horizontal_diagnostics(spec, diag);
        return out;
    }
    if (abs_t >= 1.0 - angle_tol) {
        out.label = "case3";
        diag["abs_T"] = abs_t;
        diag["generator_curvature"] = 2.0 * abs_h;
        diag["abs_H"] = abs_h;
        return out;
    }

    const double combo = report.scalar("case4_combination").magnitude();
    const double case_tol = tol.apply(kCaseTol);
    if (report.c < 0.0 && combo <= case_tol) {
        out.label = "case4";
        diag["P_H2-compatible"] = true;
        diag["case4_combination"] = combo;
        diag["abs_T"] = abs_t;
        diag["abs_H"] = abs_h;
        diag["HN"] = report.scalar("HN").mean;
        diag["K"] = report.scalar("K").mean;
        return out;
    }

    const double k_mag = report.scalar("K").magnitude();
    const double l1_mag = report.scalar("lambda1").magnitude();
    if (report.c > 0.0 && k_mag <= case_tol && l1_mag <= case_tol) {
        out.label = "case5";
        diag["K"] = k_mag;
        diag["lambda1"] = l1_mag;
        diag["abs_T"] = abs_t;
        diag["abs_H"] = abs_h;
        if (const ScalarStats* lam = report.find_scalar("lambda")) {
            diag["lambda"] = lam->mean;
            diag["expected_lambda"] = std::sqrt(std::max(0.0, report.c * (1.0 - abs_t * abs_t)));
        }
        return out;
    }

    out.label = "unclassified";
    diag["abs_T"] = abs_t;
    diag["abs_T_to_one"] = 1.0 - abs_t;
    diag["abs_H"] = abs_h;
    diag["case4_combination"] = combo;
    diag["K"] = k_mag;
    diag["lambda1"] = l1_mag;
    diag["c"] = report.c;
    return out;
}

} // namespace helix
