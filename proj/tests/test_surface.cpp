#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "helix/immersion.hpp"
#include "helix/surface_geometry.hpp"
#include "oracle_fd.hpp"

using namespace helix;

namespace {

std::vector<ImmersionSpec> gallery() {
    std::vector<ImmersionSpec> out;
    out.push_back(make_slice(1.0, 0.3));
    out.push_back(make_slice(-1.0, -0.2));
    out.push_back(make_slice(0.0, 1.0));
    out.push_back(make_vertical_cylinder(1.0, 2, 0.8));
    out.push_back(make_vertical_cylinder(-1.0, 2, 1.4));
    out.push_back(make_vertical_cylinder(0.0, 2, 2.0));
    out.push_back(make_torus_helix(1.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.5));
    out.push_back(make_cmc_torus(1.0, 0.6, 0.8));
    out.push_back(make_geodesic_sphere_in_small_sphere(1.0, 0.9));
    out.push_back(make_graph_strip(1.0));
    return out;
}

std::pair<double, double> probe_point(const ImmersionSpec& s, double fu, double fv) {
    return {s.u_range[0] + fu * (s.u_range[1] - s.u_range[0]),
            s.v_range[0] + fv * (s.v_range[1] - s.v_range[0])};
}

} // namespace

TEST_CASE("gallery surfaces live on the product manifold") {
    for (const auto& spec : gallery()) {
        CAPTURE(spec.kind);
        CAPTURE(spec.pa.c());
        for (double fu : {0.1, 0.5, 0.85}) {
            for (double fv : {0.2, 0.5, 0.9}) {
                auto [u, v] = probe_point(spec, fu, fv);
                JVec f = surface_jets(spec, u, v, 0);
                CHECK(manifold_residual(spec.pa, jv_values(f)) < 1e-12);
            }
        }
    }
}

TEST_CASE("surface jets agree with Richardson finite differences") {
    for (const auto& spec : gallery()) {
        CAPTURE(spec.kind);
        CAPTURE(spec.pa.c());
        auto [u0, v0] = probe_point(spec, 0.4, 0.6);
        JVec f = surface_jets(spec, u0, v0, 2);
        for (int k = 0; k < spec.pa.dim(); ++k) {
            auto coord = [&](double u, double v) { return surface_jets(spec, u, v, 0)[k].value(); };
            for (int a = 0; a <= 2; ++a) {
                for (int b = 0; a + b <= 2 && a + b >= 1; ++b) {
                    double fd = oracle::partial(coord, u0, v0, a, b);
                    double jet = f[k].partial(a, b);
                    CAPTURE(k);
                    CAPTURE(a);
                    CAPTURE(b);
                    CHECK(std::abs(jet - fd) < 1e-7 * std::max(1.0, std::abs(fd)));
                }
            }
        }
    }
}

TEST_CASE("domain checks on parameters and order") {
    ImmersionSpec slice = make_slice(1.0, 0.0);
    CHECK_NOTHROW((void)surface_jets(slice, 100.0, 0.0, 1)); // periodic direction
    CHECK_THROWS_AS((void)surface_jets(slice, 0.0, 50.0, 1), DomainError);
    CHECK_THROWS_AS((void)surface_jets(slice, 0.0, 0.0, 5), ParameterError);
    CHECK_NOTHROW((void)surface_jets(slice, 0.0, 1.3, 1)); // small overshoot tolerated
}

TEST_CASE("frames are orthonormal, oriented, and split the vertical field") {
    for (const auto& spec : gallery()) {
        CAPTURE(spec.kind);
        CAPTURE(spec.pa.c());
        auto [u, v] = probe_point(spec, 0.35, 0.55);
        GeometryJets g = geometry_jets(spec, u, v);
        const ProductAmbient& pa = g.pa;

        CHECK(std::abs(jv_inner(pa, g.e1.ambient, g.e1.ambient).value() - 1.0) < 1e-12);
        CHECK(std::abs(jv_inner(pa, g.e2.ambient, g.e2.ambient).value() - 1.0) < 1e-12);
        CHECK(std::abs(jv_inner(pa, g.e1.ambient, g.e2.ambient).value()) < 1e-12);
        CHECK(g.e1.a.value() * g.e2.b.value() - g.e2.a.value() * g.e1.b.value() > 0.0);

        REQUIRE(static_cast<int>(g.normals.size()) == pa.sf.n - 1);
        for (size_t a = 0; a < g.normals.size(); ++a) {
            CHECK(std::abs(jv_inner(pa, g.normals[a], g.normals[a]).value() - 1.0) < 1e-12);
            CHECK(std::abs(jv_inner(pa, g.normals[a], g.e1.ambient).value()) < 1e-12);
            CHECK(std::abs(jv_inner(pa, g.normals[a], g.e2.ambient).value()) < 1e-12);
            for (size_t b = 0; b < a; ++b) {
                CHECK(std::abs(jv_inner(pa, g.normals[a], g.normals[b]).value()) < 1e-12);
            }
            if (pa.curved()) {
                JVec fM = jv_m_block(pa, g.f);
                CHECK(std::abs(jv_inner_m(pa, g.normals[a], jv_truncated(fM, 3)).value()) < 1e-10);
            }
        }

        // T + N = xi, T tangent, N normal.
        Vec sum = vadd(jv_values(g.T), jv_values(g.N));
        Vec xi = pa.xi();
        for (int k = 0; k < pa.dim(); ++k) CHECK(std::abs(sum[k] - xi[k]) < 1e-12);
        CHECK(std::abs(inner(pa, jv_values(g.N), jv_values(g.fu))) < 1e-10);
        CHECK(std::abs(inner(pa, jv_values(g.N), jv_values(g.fv))) < 1e-10);
        CHECK(g.abs_T.value() * g.abs_T.value() + g.abs_N.value() * g.abs_N.value() ==
              doctest::Approx(1.0).epsilon(1e-12));

        // The two routes to <sigma(e_i,e_j), H> agree.
        Mat2 from_parts = Mat2::diag(0.0, 0.0);
        for (size_t a = 0; a < g.A.size(); ++a) {
            double mean = 0.5 * (g.A[a].m[0][0].value() + g.A[a].m[1][1].value());
            from_parts = from_parts + g.A[a].values().scaled(mean);
        }
        CHECK((g.A_H.values() - from_parts).max_abs() < 1e-12);
    }
}

TEST_CASE("intrinsic and extrinsic Gauss curvature agree on the whole gallery") {
    for (const auto& spec : gallery()) {
        CAPTURE(spec.kind);
        CAPTURE(spec.pa.c());
        for (double fu : {0.25, 0.6}) {
            for (double fv : {0.3, 0.7}) {
                auto [u, v] = probe_point(spec, fu, fv);
                GeometryJets g = geometry_jets(spec, u, v);
                CHECK(std::abs(g.K.value() - gauss_from_ambient(g)) < 1e-9);
            }
        }
    }
}

TEST_CASE("slice: totally geodesic horizontal surface") {
    for (double c : {1.0, -1.0}) {
        CAPTURE(c);
        ImmersionSpec spec = make_slice(c, 0.3);
        auto [u, v] = probe_point(spec, 0.45, 0.6);
        GeometryJets g = geometry_jets(spec, u, v);
        CHECK(g.abs_T.value() < 1e-13);
        CHECK(g.abs_N.value() == doctest::Approx(1.0));
        CHECK(!g.e1_along_T);
        CHECK(g.abs_H.value() < 1e-12);
        for (const auto& A : g.A) CHECK(A.values().max_abs() < 1e-11);
        CHECK(g.K.value() == doctest::Approx(c).epsilon(1e-9));
    }
}

TEST_CASE("vertical cylinder: unit tangential angle and curve curvature in the profile") {
    ImmersionSpec spec = make_vertical_cylinder(1.0, 2, 0.8);
    auto [u, v] = probe_point(spec, 0.3, 0.5);
    GeometryJets g = geometry_jets(spec, u, v);
    CHECK(g.abs_T.value() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.abs_N.value() < 1e-8);
    CHECK(g.e1_along_T);
    // sigma(e2, e2) is the profile curvature vector; sigma(e1, *) vanishes.
    CHECK(g.abs_H.value() == doctest::Approx(0.4).epsilon(1e-10));
    CHECK(std::abs(g.K.value()) < 1e-9);
    CHECK(std::abs(g.lambda1.value()) < 1e-10);
    CHECK(std::abs(g.HN.value()) < 1e-10);
}

TEST_CASE("helical torus: constant angle, mean curvature and pmc defect by closed form") {
    const double h = 0.5;
    ImmersionSpec spec = make_torus_helix(1.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), h);
    for (double fu : {0.2, 0.7}) {
        auto [u, v] = probe_point(spec, fu, 0.4);
        GeometryJets g = geometry_jets(spec, u, v);
        CHECK(g.abs_T.value() == doctest::Approx(h).epsilon(1e-12));
        CHECK(g.abs_H.value() == doctest::Approx(h * h / 2.0).epsilon(1e-10));
        CHECK(g.e1_along_T);
        // Normal defect of the mean curvature derivative, by hand:
        // |(nabla H along e1)^perp| = h^3 sqrt(1 - h^2) / 2, zero along e2.
        JVec dH1 = frame_covariant(g, 0, g.H);
        Vec def1 = normal_part_values(g, jv_values(dH1));
        CHECK(vnorm(def1) ==
              doctest::Approx(h * h * h * std::sqrt(1.0 - h * h) / 2.0).epsilon(1e-8));
        JVec dH2 = frame_covariant(g, 1, g.H);
        Vec def2 = normal_part_values(g, jv_values(dH2));
        CHECK(vnorm(def2) < 1e-10);
    }
}

TEST_CASE("cmc torus: horizontal, flat, constant mean curvature, not pseudo-umbilical") {
    ImmersionSpec spec = make_cmc_torus(1.0, 0.6, 0.8);
    auto [u, v] = probe_point(spec, 0.3, 0.8);
    GeometryJets g = geometry_jets(spec, u, v);
    CHECK(g.abs_T.value() < 1e-12);
    CHECK(std::abs(g.K.value()) < 1e-9);
    // |H| = |r1/r2 - r2/r1| / 2 = 7/24 for radii (0.6, 0.8).
    CHECK(g.abs_H.value() == doctest::Approx(7.0 / 24.0).epsilon(1e-10));
    CHECK(eigen_spread(g.A_H.values()) > 0.1);
    // The vertical field is normal here and its shape operator vanishes.
    CHECK(g.A_N.values().max_abs() < 1e-10);
}

TEST_CASE("geodesic sphere in a great hypersphere is totally umbilical") {
    const double rho = 0.9;
    ImmersionSpec spec = make_geodesic_sphere_in_small_sphere(1.0, rho);
    auto [u, v] = probe_point(spec, 0.4, 0.35);
    GeometryJets g = geometry_jets(spec, u, v);
    CHECK(g.abs_T.value() < 1e-12);
    CHECK(g.abs_H.value() == doctest::Approx(1.0 / std::tan(rho)).epsilon(1e-9));
    CHECK(eigen_spread(g.A_H.values()) < 1e-10);
    CHECK(g.K.value() == doctest::Approx(1.0 / (std::sin(rho) * std::sin(rho))).epsilon(1e-8));
}

TEST_CASE("graph strip has a genuinely varying angle function") {
    ImmersionSpec spec = make_graph_strip(1.0);
    auto [u1, v1] = probe_point(spec, 0.3, 0.5);
    auto [u2, v2] = probe_point(spec, 0.3, 0.9);
    GeometryJets g1 = geometry_jets(spec, u1, v1);
    GeometryJets g2 = geometry_jets(spec, u2, v2);
    CHECK(g1.abs_T.value() > 0.1);
    CHECK(g1.abs_T.value() < 0.999);
    CHECK(std::abs(g1.abs_T.value() - g2.abs_T.value()) > 0.01);

    // Tangential derivatives of the angle agree with finite differences of
    // pointwise evaluations.
    auto absT = [&](double u, double v) { return geometry_jets(spec, u, v, 1).abs_T.value(); };
    double du = oracle::partial(absT, u1, v1, 1, 0);
    double dv = oracle::partial(absT, u1, v1, 0, 1);
    double along_e1 = g1.e1.a.value() * du + g1.e1.b.value() * dv;
    double along_e2 = g1.e2.a.value() * du + g1.e2.b.value() * dv;
    CHECK(frame_scalar_derivative(g1, 0, g1.abs_T) == doctest::Approx(along_e1).epsilon(1e-7));
    CHECK(frame_scalar_derivative(g1, 1, g1.abs_T) == doctest::Approx(along_e2).epsilon(1e-7));
}

TEST_CASE("connection coefficients are antisymmetric in their frame indices") {
    for (const auto& spec : gallery()) {
        CAPTURE(spec.kind);
        CAPTURE(spec.pa.c());
        auto [u, v] = probe_point(spec, 0.52, 0.47);
        GeometryJets g = geometry_jets(spec, u, v);
        for (int i = 0; i < 2; ++i) {
            CHECK(std::abs(tangent_connection(g, i, 0, 0)) < 1e-10);
            CHECK(std::abs(tangent_connection(g, i, 1, 1)) < 1e-10);
            CHECK(tangent_connection(g, i, 0, 1) ==
                  doctest::Approx(-tangent_connection(g, i, 1, 0)).epsilon(1e-10));
            for (size_t a = 0; a < g.normals.size(); ++a) {
                for (size_t b = 0; b <= a; ++b) {
                    double wab = normal_connection(g, i, static_cast<int>(a), static_cast<int>(b));
                    double wba = normal_connection(g, i, static_cast<int>(b), static_cast<int>(a));
                    CHECK(std::abs(wab + wba) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("adapted normal frame recovers mean-curvature shape data") {
    ImmersionSpec spec = make_cmc_torus(1.0, 0.6, 0.8);
    auto [u, v] = probe_point(spec, 0.3, 0.8);
    GeometryJets g = geometry_jets(spec, u, v);
    AdaptedNormalFrame af = adapted_normal_frame(g);
    REQUIRE(af.ok);
    REQUIRE(af.normals.size() == 2);
    // First adapted normal is H/|H|: its shape matrix has trace 2|H|.
    CHECK(af.shape[0].trace() == doctest::Approx(2.0 * g.abs_H.value()).epsilon(1e-10));
    CHECK(eigen_spread(af.shape[0]) == doctest::Approx(0.6 / 0.8 + 0.8 / 0.6).epsilon(1e-9));

    // Slices have H = 0: no adapted frame.
    ImmersionSpec sl = make_slice(1.0, 0.0);
    GeometryJets gs = geometry_jets(sl, 0.3, 0.4);
    CHECK(!adapted_normal_frame(gs).ok);
}

TEST_CASE("sampled grids reproduce the geometry within the interpolation floor") {
    ImmersionSpec torus = make_torus_helix(1.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.5);
    const char* path = "surface_grid_roundtrip.csv";
    write_grid_csv(torus, 161, 161, path);
    ImmersionSpec grid = load_grid_csv(1.0, 3, path);
    CHECK(grid.kind == "grid");
    CHECK(grid.u_range[0] == doctest::Approx(torus.u_range[0]));
    CHECK(grid.u_range[1] == doctest::Approx(torus.u_range[1]));

    auto [u, v] = probe_point(torus, 0.37, 0.58);
    GeometryJets ga = geometry_jets(torus, u, v);
    GeometryJets gb = geometry_jets(grid, u, v);
    for (int k = 0; k < torus.pa.dim(); ++k) {
        CHECK(std::abs(ga.f[k].value() - gb.f[k].value()) < 1e-9);
        CHECK(std::abs(ga.fu[k].value() - gb.fu[k].value()) < 1e-6);
    }
    CHECK(std::abs(ga.abs_T.value() - gb.abs_T.value()) < 1e-6);
    CHECK(std::abs(ga.abs_H.value() - gb.abs_H.value()) < 1e-4);
    CHECK(std::abs(ga.K.value() - gb.K.value()) < 5e-3);
    std::remove(path);
}

TEST_CASE("grid loader rejects malformed files") {
    auto write_file = [](const char* path, const std::string& body) {
        std::ofstream out(path);
        out << body;
    };
    const char* path = "surface_grid_bad.csv";

    write_file(path, "u,v,x0,x1,x2,x3\n");
    CHECK_THROWS_AS((void)load_grid_csv(1.0, 2, path), ParameterError);

    write_file(path, "u,v,x0\n0,0,1\n0,1,1\n");
    CHECK_THROWS_AS((void)load_grid_csv(1.0, 2, path), ShapeError);

    std::string ragged = "u,v,x0,x1,x2,x3\n";
    ragged += "0,0,1,0,0,0\n0,1,1,0,0\n";
    write_file(path, ragged);
    CHECK_THROWS_AS((void)load_grid_csv(1.0, 2, path), ParameterError);

    std::string sparse = "u,v,x0,x1,x2,x3\n";
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 5; ++j)
            sparse += std::to_string(i) + "," + std::to_string(j) + ",1,0,0,0\n";
    write_file(path, sparse);
    CHECK_THROWS_AS((void)load_grid_csv(1.0, 2, path), ParameterError); // too few u rows

    write_file(path, "u,v,x0,x1,x2,x3\n0,0,not_a_number,0,0,0\n");
    CHECK_THROWS_AS((void)load_grid_csv(1.0, 2, path), ParameterError);
    std::remove(path);
}
