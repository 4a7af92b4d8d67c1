#include "helix/immersion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "helix/curve.hpp"
#include "helix/errors.hpp"

namespace helix {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_axis(double x, const std::array<double, 2>& range, bool periodic, const char* name) {
    if (periodic) return;
    double margin = 0.25 * (range[1] - range[0]) + 1e-9;
    if (x < range[0] - margin || x > range[1] + margin) {
        throw DomainError(std::string("surface parameter ") + name + " outside patch domain");
    }
}

// Embed a one-variable jet in s as a two-variable jet in (u, v) that is
// constant in v; exact because the lifted function has no v dependence.
Jet lift_to_u(const Jet& j, int order) {
    Jet r = Jet::constant(0.0, 2, order);
    int top = std::min(order, j.order());
    for (int a = 0; a <= top; ++a) r.at(a, 0) = j.coeff(a);
    return r;
}

} // namespace

JVec surface_jets(const ImmersionSpec& spec, double u, double v, int order) {
    if (!spec.eval) throw PreconditionError("immersion has no evaluator");
    if (order < 0 || order > Jet::max_order) throw ParameterError("jet order must be in [0, 4]");
    check_axis(u, spec.u_range, spec.periodic_u, "u");
    check_axis(v, spec.v_range, spec.periodic_v, "v");
    JVec f = spec.eval(u, v, order);
    if (static_cast<int>(f.size()) != spec.pa.dim()) {
        throw ShapeError("immersion evaluator returned wrong ambient dimension");
    }
    return f;
}

ImmersionSpec make_slice(double c, double t0) {
    ImmersionSpec spec;
    spec.pa = ProductAmbient::make(c, 2);
    spec.kind = "slice";
    spec.params = {{"c", c}, {"t0", t0}};
    const ProductAmbient pa = spec.pa;
    if (c > 0.0) {
        const double r = pa.sf.radius();
        spec.u_range = {0.0, 2.0 * kPi};
        spec.v_range = {-1.2, 1.2};
        spec.periodic_u = true;
        spec.eval = [pa, r, t0](double u, double v, int order) {
            Jet ju = Jet::variable(u, 0, 2, order);
            Jet jv = Jet::variable(v, 1, 2, order);
            JVec f = jv_zero(ju, pa.dim());
            f[0] = cos(jv) * cos(ju) * r;
            f[1] = cos(jv) * sin(ju) * r;
            f[2] = sin(jv) * r;
            f[3] = Jet::constant(t0, 2, order);
            return f;
        };
    } else if (c < 0.0) {
        const double r = pa.sf.radius();
        spec.u_range = {-1.5, 1.5};
        spec.v_range = {-1.5, 1.5};
        spec.eval = [pa, r, t0](double u, double v, int order) {
            Jet ju = Jet::variable(u, 0, 2, order);
            Jet jv = Jet::variable(v, 1, 2, order);
            Jet chu = (exp(ju) + exp(-ju)) * 0.5;
            Jet shu = (exp(ju) - exp(-ju)) * 0.5;
            Jet chv = (exp(jv) + exp(-jv)) * 0.5;
            Jet shv = (exp(jv) - exp(-jv)) * 0.5;
            JVec f = jv_zero(ju, pa.dim());
            f[0] = chu * chv * r;
            f[1] = shu * chv * r;
            f[2] = shv * r;
            f[3] = Jet::constant(t0, 2, order);
            return f;
        };
    } else {
        spec.u_range = {-2.0, 2.0};
        spec.v_range = {-2.0, 2.0};
        spec.eval = [pa, t0](double u, double v, int order) {
            JVec f = jv_zero(Jet::constant(0.0, 2, order), pa.dim());
            f[0] = Jet::variable(u, 0, 2, order);
            f[1] = Jet::variable(v, 1, 2, order);
            f[2] = Jet::constant(t0, 2, order);
            return f;
        };
    }
    return spec;
}

ImmersionSpec make_vertical_cylinder(double c, int n, double kappa) {
    ImmersionSpec spec;
    spec.pa = ProductAmbient::make(c, n);
    spec.kind = "vertical_cylinder";
    spec.params = {{"c", c}, {"n", n}, {"kappa", kappa}};
    CurveSpec base = spaceform_circle_canonical(spec.pa.sf, kappa);
    const ProductAmbient pa = spec.pa;
    const int xi = pa.xi_index();
    double radius_sq = kappa * kappa + c;
    if (radius_sq > 0.0) {
        spec.u_range = {0.0, 2.0 * kPi / std::sqrt(radius_sq)};
        spec.periodic_u = true;
    } else {
        spec.u_range = {-2.0, 2.0}; // flat geodesic: a vertical plane strip
    }
    spec.v_range = {-2.0, 2.0};
    spec.eval = [pa, base, xi](double u, double v, int order) {
        JVec curve = base.eval(u, order);
        JVec f = jv_zero(Jet::constant(0.0, 2, order), pa.dim());
        for (int k = 0; k < xi; ++k) f[k] = lift_to_u(curve[k], order);
        f[xi] = Jet::variable(v, 1, 2, order);
        return f;
    };
    return spec;
}

namespace {

ImmersionSpec make_product_torus(double c, double r1, double r2, double slope,
                                 const std::string& kind) {
    if (c <= 0.0) throw ParameterError(kind + " requires c > 0");
    if (slope < 0.0 || slope >= 1.0) throw ParameterError(kind + " slope must lie in [0, 1)");
    if (r1 <= 0.0) throw ParameterError(kind + " requires r1 > 0");
    if (r2 <= 0.0) {
        double rest = 1.0 / c - r1 * r1;
        if (rest <= 0.0) throw ParameterError(kind + " radius r1 exceeds the ambient radius");
        r2 = std::sqrt(rest);
    }
    if (std::abs(r1 * r1 + r2 * r2 - 1.0 / c) > 1e-9 / c) {
        throw ParameterError(kind + " radii must satisfy r1^2 + r2^2 = 1/c");
    }
    ImmersionSpec spec;
    spec.pa = ProductAmbient::make(c, 3);
    spec.kind = kind;
    spec.params = {{"c", c}, {"r1", r1}, {"r2", r2}};
    if (kind == "torus_helix") spec.params["slope"] = slope;
    const double alpha = std::sqrt(1.0 - slope * slope) / r1; // unit speed along u
    const double beta = 1.0 / r2;                             // unit speed along v
    spec.u_range = {0.0, 2.0 * kPi / alpha};
    spec.v_range = {0.0, 2.0 * kPi / beta};
    spec.periodic_u = slope == 0.0; // a nonzero slope winds up the vertical axis
    spec.periodic_v = true;
    const ProductAmbient pa = spec.pa;
    spec.eval = [pa, r1, r2, alpha, beta, slope](double u, double v, int order) {
        Jet au = Jet::variable(u, 0, 2, order) * alpha;
        Jet bv = Jet::variable(v, 1, 2, order) * beta;
        JVec f = jv_zero(au, pa.dim());
        f[0] = cos(au) * r1;
        f[1] = sin(au) * r1;
        f[2] = cos(bv) * r2;
        f[3] = sin(bv) * r2;
        f[4] = Jet::variable(u, 0, 2, order) * slope;
        return f;
    };
    return spec;
}

} // namespace

ImmersionSpec make_torus_helix(double c, double r1, double r2, double slope) {
    return make_product_torus(c, r1, r2, slope, "torus_helix");
}

ImmersionSpec make_cmc_torus(double c, double r1, double r2) {
    return make_product_torus(c, r1, r2, 0.0, "cmc_torus");
}

ImmersionSpec make_geodesic_sphere_in_small_sphere(double c, double rho) {
    if (c <= 0.0) throw ParameterError("geodesic_sphere requires c > 0");
    if (rho <= 0.0 || rho >= kPi) throw ParameterError("geodesic_sphere polar radius must lie in (0, pi)");
    ImmersionSpec spec;
    spec.pa = ProductAmbient::make(c, 4);
    spec.kind = "geodesic_sphere";
    spec.params = {{"c", c}, {"rho", rho}};
    spec.u_range = {0.0, 2.0 * kPi};
    spec.v_range = {-1.2, 1.2};
    spec.periodic_u = true;
    const ProductAmbient pa = spec.pa;
    const double r = pa.sf.radius();
    spec.eval = [pa, r, rho](double u, double v, int order) {
        Jet ju = Jet::variable(u, 0, 2, order);
        Jet jv = Jet::variable(v, 1, 2, order);
        const double a = r * std::cos(rho); // height of the small sphere
        const double b = r * std::sin(rho); // its Euclidean radius
        JVec f = jv_zero(ju, pa.dim());
        f[0] = Jet::constant(a, 2, order);
        f[1] = cos(jv) * cos(ju) * b;
        f[2] = cos(jv) * sin(ju) * b;
        f[3] = sin(jv) * b;
        f[4] = Jet::constant(0.0, 2, order);
        f[5] = Jet::constant(0.0, 2, order);
        return f;
    };
    return spec;
}

ImmersionSpec make_graph_strip(double c) {
    if (c <= 0.0) throw ParameterError("graph_strip requires c > 0");
    ImmersionSpec spec;
    spec.pa = ProductAmbient::make(c, 2);
    spec.kind = "graph_strip";
    spec.params = {{"c", c}};
    spec.u_range = {0.0, 2.0 * kPi};
    spec.v_range = {-1.2, 1.2};
    const ProductAmbient pa = spec.pa;
    const double r = pa.sf.radius();
    spec.eval = [pa, r](double u, double v, int order) {
        Jet ju = Jet::variable(u, 0, 2, order);
        Jet jv = Jet::variable(v, 1, 2, order);
        JVec f = jv_zero(ju, pa.dim());
        f[0] = cos(jv) * cos(ju) * r;
        f[1] = cos(jv) * sin(ju) * r;
        f[2] = sin(jv) * r;
        f[3] = Jet::variable(u, 0, 2, order); // vertical graph over the angle
        return f;
    };
    return spec;
}

void write_grid_csv(const ImmersionSpec& spec, int nu, int nv, const std::string& path) {
    if (nu < 2 || nv < 2) throw ParameterError("grid must have at least 2 samples per axis");
    std::ofstream out(path);
    if (!out) throw ParameterError("cannot open grid csv for writing: " + path);
    out << std::setprecision(17);
    out << "u,v";
    for (int k = 0; k < spec.pa.dim(); ++k) out << ",x" << k;
    out << "\n";
    const double hu = (spec.u_range[1] - spec.u_range[0]) / (nu - 1);
    const double hv = (spec.v_range[1] - spec.v_range[0]) / (nv - 1);
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            double u = spec.u_range[0] + i * hu;
            double v = spec.v_range[0] + j * hv;
            JVec f = surface_jets(spec, u, v, 0);
            out << u << "," << v;
            for (const Jet& x : f) out << "," << x.value();
            out << "\n";
        }
    }
    if (!out) throw ParameterError("failed while writing grid csv: " + path);
}

namespace {

struct GridData {
    double u0 = 0.0, v0 = 0.0, hu = 0.0, hv = 0.0;
    int nu = 0, nv = 0, dim = 0;
    std::vector<Vec> rows; // u-major, v fastest
};

std::vector<double> parse_csv_row(const std::string& line, int line_no) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(cell, &used));
        } catch (const std::exception&) {
            throw ParameterError("grid csv line " + std::to_string(line_no) +
                                 ": cannot parse number '" + cell + "'");
        }
    }
    return out;
}

GridData read_grid(const std::string& path, int expected_dim) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open grid csv: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParameterError("grid csv is empty: " + path);
    // Header row: u,v,x0,...
    std::vector<std::vector<double>> raw;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        raw.push_back(parse_csv_row(line, line_no));
        if (raw.back().size() != raw.front().size()) {
            throw ParameterError("grid csv line " + std::to_string(line_no) + ": ragged row");
        }
    }
    if (raw.empty()) throw ParameterError("grid csv has no data rows: " + path);
    GridData g;
    g.dim = static_cast<int>(raw.front().size()) - 2;
    if (g.dim != expected_dim) {
        throw ShapeError("grid csv has " + std::to_string(g.dim) +
                         " coordinates, ambient needs " + std::to_string(expected_dim));
    }
    g.u0 = raw.front()[0];
    g.v0 = raw.front()[1];
    size_t total = raw.size();
    size_t nv = 0;
    while (nv < total && raw[nv][0] == g.u0) ++nv;
    if (nv < 5 || total % nv != 0) {
        throw ParameterError("grid csv is not a complete u-major lattice with >= 5 v samples");
    }
    g.nv = static_cast<int>(nv);
    g.nu = static_cast<int>(total / nv);
    if (g.nu < 5) throw ParameterError("grid csv needs at least 5 u samples");
    g.hv = raw[1][1] - raw[0][1];
    g.hu = raw[nv][0] - raw[0][0];
    if (g.hu <= 0.0 || g.hv <= 0.0) throw ParameterError("grid csv axes must be strictly increasing");
    double scale_u = std::abs(g.u0) + std::abs(g.hu) * g.nu;
    double scale_v = std::abs(g.v0) + std::abs(g.hv) * g.nv;
    g.rows.reserve(total);
    for (size_t idx = 0; idx < total; ++idx) {
        int i = static_cast<int>(idx) / g.nv;
        int j = static_cast<int>(idx) % g.nv;
        if (std::abs(raw[idx][0] - (g.u0 + i * g.hu)) > 1e-9 * scale_u ||
            std::abs(raw[idx][1] - (g.v0 + j * g.hv)) > 1e-9 * scale_v) {
            throw ParameterError("grid csv is not a uniform lattice near data row " +
                                 std::to_string(idx + 1));
        }
        g.rows.emplace_back(raw[idx].begin() + 2, raw[idx].end());
    }
    return g;
}

// Degree-4 Lagrange basis over 5 consecutive nodes starting at `start`,
// evaluated in jet arithmetic (exact for the interpolating polynomial).
std::array<Jet, 5> lagrange_basis(const Jet& x, double x0, double h, int start) {
    std::array<Jet, 5> w;
    for (int k = 0; k < 5; ++k) {
        Jet num = Jet::constant(1.0, x.num_vars(), x.order());
        double den = 1.0;
        double xk = x0 + (start + k) * h;
        for (int m = 0; m < 5; ++m) {
            if (m == k) continue;
            double xm = x0 + (start + m) * h;
            num = num * (x - xm);
            den *= xk - xm;
        }
        w[k] = num * (1.0 / den);
    }
    return w;
}

int stencil_start(double x, double x0, double h, int n) {
    int near = static_cast<int>(std::lround((x - x0) / h));
    return std::clamp(near - 2, 0, n - 5);
}

} // namespace

ImmersionSpec load_grid_csv(double c, int n, const std::string& path) {
    ImmersionSpec spec;
    spec.pa = ProductAmbient::make(c, n);
    auto grid = std::make_shared<GridData>(read_grid(path, spec.pa.dim()));
    spec.kind = "grid";
    spec.params = {{"c", c}, {"n", n}, {"path", path}};
    spec.u_range = {grid->u0, grid->u0 + (grid->nu - 1) * grid->hu};
    spec.v_range = {grid->v0, grid->v0 + (grid->nv - 1) * grid->hv};
    const int dim = spec.pa.dim();
    spec.eval = [grid, dim](double u, double v, int order) {
        Jet ju = Jet::variable(u, 0, 2, order);
        Jet jv = Jet::variable(v, 1, 2, order);
        int su = stencil_start(u, grid->u0, grid->hu, grid->nu);
        int sv = stencil_start(v, grid->v0, grid->hv, grid->nv);
        std::array<Jet, 5> wu = lagrange_basis(ju, grid->u0, grid->hu, su);
        std::array<Jet, 5> wv = lagrange_basis(jv, grid->v0, grid->hv, sv);
        JVec f = jv_zero(ju, dim);
        for (int a = 0; a < 5; ++a) {
            for (int b = 0; b < 5; ++b) {
                Jet w = wu[a] * wv[b];
                const Vec& node = grid->rows[(su + a) * grid->nv + (sv + b)];
                for (int k = 0; k < dim; ++k) f[k] += w * node[k];
            }
        }
        return f;
    };
    return spec;
}

} // namespace helix
