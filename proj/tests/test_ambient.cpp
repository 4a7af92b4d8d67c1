#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helix/ambient.hpp"
#include "oracle_fd.hpp"

using namespace helix;

namespace {

Vec unit_axis(int dim, int k) {
    Vec v(dim, 0.0);
    v[k] = 1.0;
    return v;
}

} // namespace

TEST_CASE("space form construction and validation") {
    CHECK(SpaceForm::make(1.0, 2).model == Model::Sphere);
    CHECK(SpaceForm::make(-0.5, 3).model == Model::Hyperboloid);
    CHECK(SpaceForm::make(0.0, 2).model == Model::Flat);
    CHECK(SpaceForm::make(4.0, 2).radius() == doctest::Approx(0.5));
    CHECK_THROWS_AS(SpaceForm::make(1.0, 1), ParameterError);
    CHECK_THROWS_AS(SpaceForm::make(1.0, 5), ParameterError);

    ProductAmbient pa = ProductAmbient::make(1.0, 3);
    CHECK(pa.dim() == 5);
    CHECK(pa.m_dim() == 4);
    CHECK(pa.xi_index() == 4);
    ProductAmbient flat = ProductAmbient::make(0.0, 2);
    CHECK(flat.dim() == 3);
}

TEST_CASE("signature metric distinguishes the hyperboloid timelike axis") {
    ProductAmbient pa = ProductAmbient::make(-1.0, 2);
    Vec a = unit_axis(pa.dim(), 0);
    CHECK(inner(pa, a, a) == -1.0);
    Vec b = unit_axis(pa.dim(), 1);
    CHECK(inner(pa, b, b) == 1.0);
    CHECK(inner(pa, a, b) == 0.0);

    ProductAmbient sp = ProductAmbient::make(1.0, 2);
    Vec c = unit_axis(sp.dim(), 0);
    CHECK(inner(sp, c, c) == 1.0);
}

TEST_CASE("manifold residual detects points off the product") {
    ProductAmbient pa = ProductAmbient::make(1.0, 2);
    Vec p = {1.0, 0.0, 0.0, 3.7};
    CHECK(manifold_residual(pa, p) == doctest::Approx(0.0));
    Vec q = {1.1, 0.0, 0.0, 0.0};
    CHECK(manifold_residual(pa, q) > 0.1);

    ProductAmbient hy = ProductAmbient::make(-1.0, 2);
    Vec up = {std::cosh(0.3), std::sinh(0.3), 0.0, -2.0};
    CHECK(manifold_residual(hy, up) == doctest::Approx(0.0).epsilon(1e-14));
    Vec down = {-std::cosh(0.3), std::sinh(0.3), 0.0, 0.0};
    CHECK(manifold_residual(hy, down) > 1e6); // wrong sheet is never accepted

    ProductAmbient fl = ProductAmbient::make(0.0, 2);
    CHECK(manifold_residual(fl, {10.0, -3.0, 0.5}) == 0.0);
}

TEST_CASE("tangent projection is idempotent and kills the model normal") {
    ProductAmbient pa = ProductAmbient::make(2.0, 3);
    double r = pa.sf.radius();
    Vec p = {r * std::cos(0.4), r * std::sin(0.4), 0.0, 0.0, 1.3};
    Vec w = {0.3, -0.8, 0.5, 0.1, -0.7};
    Vec t = project_tangent(pa, p, w);
    CHECK(std::abs(inner_m(pa, t, m_block(pa, p))) < 1e-14);
    Vec tt = project_tangent(pa, p, t);
    for (int k = 0; k < pa.dim(); ++k) CHECK(tt[k] == doctest::Approx(t[k]).epsilon(1e-14));
    // The vertical component passes through untouched.
    CHECK(t[4] == -0.7);
}

TEST_CASE("geodesics of both curved models have vanishing covariant acceleration") {
    // Great circle on the sphere factor, unit speed.
    ProductAmbient sp = ProductAmbient::make(1.0, 2);
    auto gamma_s = [&](double s) { return Vec{std::cos(s), std::sin(s), 0.0, 0.0}; };
    auto dgamma_s = [&](double s) { return Vec{-std::sin(s), std::cos(s), 0.0, 0.0}; };
    for (double s : {0.0, 0.7, 2.9}) {
        Vec acc = oracle::d1v(dgamma_s, s);
        Vec cov = covariant_from_flat(sp, gamma_s(s), dgamma_s(s), dgamma_s(s), acc);
        CHECK(vnorm(cov) < 1e-9);
    }
    // Hyperboloid geodesic through the base point, unit speed.
    ProductAmbient hy = ProductAmbient::make(-1.0, 2);
    auto gamma_h = [&](double s) { return Vec{std::cosh(s), std::sinh(s), 0.0, 0.0}; };
    auto dgamma_h = [&](double s) { return Vec{std::sinh(s), std::cosh(s), 0.0, 0.0}; };
    for (double s : {0.0, 0.5, 1.4}) {
        CHECK(std::abs(inner(hy, dgamma_h(s), dgamma_h(s)) - 1.0) < 1e-14);
        Vec acc = oracle::d1v(dgamma_h, s);
        Vec cov = covariant_from_flat(hy, gamma_h(s), dgamma_h(s), dgamma_h(s), acc);
        CHECK(vnorm(cov) < 1e-9);
    }
}

TEST_CASE("curvature tensor has the product-space symmetries and sectional values") {
    for (double c : {1.0, -1.0, 2.0}) {
        CAPTURE(c);
        ProductAmbient pa = ProductAmbient::make(c, 3);
        int d = pa.dim();
        // A generic triple of vectors.
        Vec x = {0.3, -0.2, 0.5, 0.1, 0.4};
        Vec y = {-0.1, 0.7, 0.2, -0.3, 0.6};
        Vec z = {0.2, 0.1, -0.4, 0.5, -0.2};
        Vec w = {0.5, 0.2, 0.3, -0.1, 0.1};

        Vec rxyz = curvature_raw(pa, x, y, z);
        Vec ryxz = curvature_raw(pa, y, x, z);
        for (int k = 0; k < d; ++k) {
            CHECK(rxyz[k] == doctest::Approx(-ryxz[k]).epsilon(1e-14)); // antisymmetry in X,Y
        }
        // Skew in the last two slots: <R(X,Y)Z, W> = -<R(X,Y)W, Z>.
        Vec rxyw = curvature_raw(pa, x, y, w);
        CHECK(inner(pa, rxyz, w) == doctest::Approx(-inner(pa, rxyw, z)).epsilon(1e-12));
        // First Bianchi identity.
        Vec ryzx = curvature_raw(pa, y, z, x);
        Vec rzxy = curvature_raw(pa, z, x, y);
        for (int k = 0; k < d; ++k) {
            CHECK(std::abs(rxyz[k] + ryzx[k] + rzxy[k]) < 1e-14);
        }

        // Horizontal orthonormal planes have sectional curvature c; planes
        // containing the vertical direction are flat.
        Vec h1 = unit_axis(d, 1), h2 = unit_axis(d, 2), xi = pa.xi();
        Vec sec = curvature_raw(pa, h1, h2, h2);
        CHECK(inner(pa, sec, h1) == doctest::Approx(c).epsilon(1e-14));
        Vec vert = curvature_raw(pa, h1, xi, xi);
        CHECK(vnorm(vert) == 0.0);
        Vec vert2 = curvature_raw(pa, xi, h1, h1);
        CHECK(vnorm(vert2) == 0.0);
    }
    // The flat product has no curvature at all.
    ProductAmbient fl = ProductAmbient::make(0.0, 2);
    Vec r = curvature_raw(fl, {1, 0, 0}, {0, 1, 0}, {0, 1, 0});
    CHECK(vnorm(r) == 0.0);
}

TEST_CASE("base-checked wrappers refuse mismatched base points") {
    ProductAmbient pa = ProductAmbient::make(1.0, 2);
    AmbientPoint p{{1.0, 0.0, 0.0, 0.0}};
    AmbientPoint q{{0.0, 1.0, 0.0, 0.0}};
    AmbientVector u{{0.0, 1.0, 0.0, 0.0}, p};
    AmbientVector v{{0.0, 0.0, 1.0, 0.0}, q};
    CHECK_THROWS_AS((void)metric_inner(pa, u, v), PreconditionError);
    AmbientVector v2{{0.0, 0.0, 1.0, 0.0}, p};
    CHECK(metric_inner(pa, u, v2) == 0.0);
    CHECK(on_manifold_residual(pa, p) == doctest::Approx(0.0));
    AmbientVector w{{0.7, 0.0, 0.0, 0.2}, p};
    AmbientVector t = tangent_project(pa, p, w);
    CHECK(t.coords[0] == doctest::Approx(0.0));
    CHECK(t.coords[3] == doctest::Approx(0.2));
}
