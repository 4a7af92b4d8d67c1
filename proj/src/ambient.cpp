#include "helix/ambient.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace helix {

namespace {
void check_dim(const ProductAmbient& pa, const Vec& v, const char* what) {
    if (static_cast<int>(v.size()) != pa.dim())
        throw ShapeError(std::string(what) + ": expected " + std::to_string(pa.dim()) +
                         " coordinates, got " + std::to_string(v.size()));
}

void check_same_base(const AmbientVector& u, const AmbientVector& v) {
    if (u.base.coords != v.base.coords)
        throw PreconditionError("ambient vectors anchored at different base points");
}
} // namespace

SpaceForm SpaceForm::make(double c, int n) {
    if (n < 2 || n > 4)
        throw ParameterError("space form dimension n must be in [2, 4], got " + std::to_string(n));
    SpaceForm sf;
    sf.c = c;
    sf.n = n;
    sf.model = c > 0.0 ? Model::Sphere : (c < 0.0 ? Model::Hyperboloid : Model::Flat);
    return sf;
}

double SpaceForm::radius() const {
    if (model == Model::Flat) throw ParameterError("flat space form has no radius");
    return 1.0 / std::sqrt(std::abs(c));
}

double inner(const ProductAmbient& pa, const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < pa.dim(); ++i) s += pa.sig(i) * a[i] * b[i];
    return s;
}

double inner_m(const ProductAmbient& pa, const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < pa.m_dim(); ++i) s += pa.sig(i) * a[i] * b[i];
    return s;
}

Vec m_block(const ProductAmbient& pa, const Vec& v) {
    Vec r = v;
    r[pa.xi_index()] = 0.0;
    return r;
}

double manifold_residual(const ProductAmbient& pa, const Vec& p) {
    if (!pa.curved()) return 0.0;
    if (pa.sf.model == Model::Hyperboloid && p[0] <= 0.0)
        return std::numeric_limits<double>::infinity();
    return std::abs(inner_m(pa, p, p) - 1.0 / pa.c());
}

Vec project_tangent(const ProductAmbient& pa, const Vec& p, const Vec& w) {
    if (!pa.curved()) return w;
    // The model normal at p is nu = p_M with <nu,nu> = 1/c.
    Vec nu = m_block(pa, p);
    Vec r = w;
    vaxpy(r, -pa.c() * inner(pa, w, nu), nu);
    return r;
}

Vec covariant_from_flat(const ProductAmbient& pa, const Vec& p, const Vec& x,
                        const Vec& y, const Vec& dxy) {
    Vec r = dxy;
    if (pa.curved()) vaxpy(r, pa.c() * inner_m(pa, x, y), m_block(pa, p));
    return r;
}

Vec curvature_raw(const ProductAmbient& pa, const Vec& x, const Vec& y, const Vec& z) {
    const Vec xi = pa.xi();
    const int k = pa.xi_index();
    const double yz = inner(pa, y, z), xz = inner(pa, x, z);
    const double xxi = x[k], yxi = y[k], zxi = z[k];
    Vec r(pa.dim(), 0.0);
    vaxpy(r, yz - yxi * zxi, x);
    vaxpy(r, -xz + xxi * zxi, y);
    vaxpy(r, xz * yxi - yz * xxi, xi);
    return vscale(r, pa.c());
}

double metric_inner(const ProductAmbient& pa, const AmbientVector& u, const AmbientVector& v) {
    check_dim(pa, u.coords, "metric_inner");
    check_dim(pa, v.coords, "metric_inner");
    check_same_base(u, v);
    return inner(pa, u.coords, v.coords);
}

double on_manifold_residual(const ProductAmbient& pa, const AmbientPoint& p) {
    check_dim(pa, p.coords, "on_manifold_residual");
    return manifold_residual(pa, p.coords);
}

AmbientVector tangent_project(const ProductAmbient& pa, const AmbientPoint& p,
                              const AmbientVector& w) {
    check_dim(pa, p.coords, "tangent_project");
    check_dim(pa, w.coords, "tangent_project");
    if (w.base.coords != p.coords)
        throw PreconditionError("tangent_project: vector not anchored at the given point");
    return {project_tangent(pa, p.coords, w.coords), p};
}

AmbientVector levi_civita_correction(const ProductAmbient& pa, const AmbientPoint& p,
                                     const AmbientVector& x, const AmbientVector& y,
                                     const AmbientVector& flat_derivative) {
    check_dim(pa, p.coords, "levi_civita_correction");
    check_same_base(x, y);
    if (x.base.coords != p.coords)
        throw PreconditionError("levi_civita_correction: vectors not anchored at the given point");
    return {covariant_from_flat(pa, p.coords, x.coords, y.coords, flat_derivative.coords), p};
}

AmbientVector curvature_tensor(const ProductAmbient& pa, const AmbientVector& x,
                               const AmbientVector& y, const AmbientVector& z) {
    check_dim(pa, x.coords, "curvature_tensor");
    check_same_base(x, y);
    check_same_base(y, z);
    return {curvature_raw(pa, x.coords, y.coords, z.coords), x.base};
}

} // namespace helix
