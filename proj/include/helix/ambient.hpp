#ifndef HELIX_AMBIENT_HPP
#define HELIX_AMBIENT_HPP

#include "helix/linalg.hpp"

namespace helix {

enum class Model { Sphere, Hyperboloid, Flat };

// Simply connected space form M^n(c), realized as a level set in a flat
// model space: a round sphere of radius 1/sqrt(c) for c > 0, the upper
// hyperboloid sheet <x,x> = 1/c (signature -,+,...,+) for c < 0, and
// Euclidean space itself for c = 0.
struct SpaceForm {
    double c = 0.0;
    int n = 2;
    Model model = Model::Flat;

    static SpaceForm make(double c, int n);

    // Model-space dimension of the space-form factor.
    int embedding_dim() const { return model == Model::Flat ? n : n + 1; }
    double radius() const; // 1/sqrt(|c|); curved models only
};

// The product M^n(c) x R with its parallel unit vertical field xi (the last
// coordinate axis). Points and vectors are coordinate tuples of length dim().
struct ProductAmbient {
    SpaceForm sf;

    static ProductAmbient make(double c, int n) { return {SpaceForm::make(c, n)}; }

    int dim() const { return sf.embedding_dim() + 1; }
    int m_dim() const { return sf.embedding_dim(); } // leading block, the M factor
    bool curved() const { return sf.model != Model::Flat; }
    double c() const { return sf.c; }
    int xi_index() const { return dim() - 1; }

    // Metric signature of coordinate axis i (-1 only for the hyperboloid
    // timelike axis, +1 otherwise).
    double sig(int i) const {
        return (sf.model == Model::Hyperboloid && i == 0) ? -1.0 : 1.0;
    }

    Vec xi() const {
        Vec v(dim(), 0.0);
        v[xi_index()] = 1.0;
        return v;
    }
};

// User-facing wrappers that keep a base point attached to each vector so
// mixed-base products are caught instead of silently computed.
struct AmbientPoint {
    Vec coords;
};

struct AmbientVector {
    Vec coords;
    AmbientPoint base;
};

// --- raw-coordinate helpers (no base bookkeeping), shared by all modules ---

// Signature-weighted inner product of full ambient vectors.
double inner(const ProductAmbient& pa, const Vec& a, const Vec& b);
// Same, restricted to the space-form block (the vertical slot ignored).
double inner_m(const ProductAmbient& pa, const Vec& a, const Vec& b);
// Copy with the vertical coordinate zeroed: the space-form part of a vector,
// and for a position the outward model normal direction of M^n(c).
Vec m_block(const ProductAmbient& pa, const Vec& v);

// Distance of p from the product manifold in the flat model: the constraint
// residual |<p_M, p_M> - 1/c| for curved models (infinite for the wrong
// hyperboloid sheet), zero in the flat case.
double manifold_residual(const ProductAmbient& pa, const Vec& p);

// Orthogonal projection of w onto the tangent space of M^n(c) x R at p.
Vec project_tangent(const ProductAmbient& pa, const Vec& p, const Vec& w);

// Ambient covariant derivative from the flat one: given X, Y and the flat
// directional derivative D_X Y at p, returns D_X Y + c <X_M, Y_M> p_M.
Vec covariant_from_flat(const ProductAmbient& pa, const Vec& p, const Vec& x,
                        const Vec& y, const Vec& dxy);

// Curvature tensor R(X,Y)Z of the product metric at p (position is unused by
// the formula but kept for interface symmetry with the other operators).
Vec curvature_raw(const ProductAmbient& pa, const Vec& x, const Vec& y, const Vec& z);

// --- base-checked operator set ---

double metric_inner(const ProductAmbient& pa, const AmbientVector& u, const AmbientVector& v);
double on_manifold_residual(const ProductAmbient& pa, const AmbientPoint& p);
AmbientVector tangent_project(const ProductAmbient& pa, const AmbientPoint& p, const AmbientVector& w);
AmbientVector levi_civita_correction(const ProductAmbient& pa, const AmbientPoint& p,
                                     const AmbientVector& x, const AmbientVector& y,
                                     const AmbientVector& flat_derivative);
AmbientVector curvature_tensor(const ProductAmbient& pa, const AmbientVector& x,
                               const AmbientVector& y, const AmbientVector& z);

} // namespace helix

#endif
