#ifndef HELIX_CURVE_HPP
#define HELIX_CURVE_HPP

#include <array>
#include <functional>
#include <string>

#include "helix/ambient.hpp"
#include "helix/jetvec.hpp"

namespace helix {

// A parametrized curve in M^n(c) x R, evaluated as one-variable coordinate
// jets of any order up to 4. Every construction in this library produces
// arc-length parametrizations; consumers reject anything else.
struct CurveSpec {
    ProductAmbient pa;
    bool arc_length = true;
    std::array<double, 2> range = {0.0, 6.283185307179586};
    std::string kind;
    std::function<JVec(double s, int order)> eval;
};

// Circle of constant geodesic curvature kappa >= 0 inside the space-form
// factor, through p with initial velocity u1, curving toward u2 (u1, u2
// orthonormal tangents of M^n(c) x {t0}). kappa = 0 yields the geodesic.
// Hyperbolic circles require kappa^2 > |c|; horocycles and equidistants are
// not closed circles and are rejected.
CurveSpec spaceform_circle(const SpaceForm& sf, const AmbientPoint& p,
                           const AmbientVector& u1, const AmbientVector& u2,
                           double kappa);

// Canonical circle at the model base point (r, 0, ..., 0; 0) with the first
// two tangent axes as u1, u2.
CurveSpec spaceform_circle_canonical(const SpaceForm& sf, double kappa);

// Flow line of the vertical field through a point.
CurveSpec vertical_line(const ProductAmbient& pa, const AmbientPoint& p);

// Latitude circle of polar angle phi on a round 2-sphere factor (c > 0),
// in its standard trigonometric parametrization. Used as an independently
// constructed cross-check of spaceform_circle (geodesic curvature cot(phi)
// in curvature units of c = 1, i.e. sqrt(c) cot(phi) in general).
CurveSpec latitude_circle(const SpaceForm& sf, double phi);

// Unit-speed curve in M^2(c), c > 0, with prescribed varying geodesic
// curvature kappa(s) = kappa0 + amplitude * sin(frequency * s), integrated
// from the canonical base point. Unit speed holds structurally, making this
// an exact oracle for non-constant-curvature classification.
CurveSpec prescribed_curvature_curve(const SpaceForm& sf, double kappa0,
                                     double amplitude, double frequency);

// Iterated ambient covariant derivatives of the velocity along the curve:
// returns { gamma', D gamma', D^2 gamma', ... } up to k-th covariant
// derivative of gamma' (k <= 3). Requires an arc-length curve.
std::vector<Vec> covariant_jets(const CurveSpec& curve, double s, int k);

struct FrenetData {
    int osculating_order = 0;            // r in {1,...,4}
    std::vector<double> curvatures;      // kappa_1 ... kappa_{r-1}
    std::vector<Vec> frame;              // X_1 ... X_r
};

// Frenet frame and curvatures at s by Gram-Schmidt on the covariant jets,
// stopping at the first curvature below tolerance.
FrenetData frenet_apparatus(const CurveSpec& curve, double s, int r_max = 4);

enum class CurveClass { Geodesic, Circle, Helix, Frenet, NonConstantCurvature };
std::string to_string(CurveClass c, int order = 0);

struct CurveClassification {
    CurveClass label = CurveClass::Geodesic;
    int osculating_order = 1;
    std::vector<double> curvature_mean;
    std::vector<double> curvature_spread; // max - min over samples
};

CurveClassification classify_curve(const CurveSpec& curve, int samples = 32);

} // namespace helix

#endif
