#ifndef HELIX_SURFACE_GEOMETRY_HPP
#define HELIX_SURFACE_GEOMETRY_HPP

#include <vector>

#include "helix/immersion.hpp"
#include "helix/jetvec.hpp"
#include "helix/linalg.hpp"

namespace helix {

struct JetMat2 {
    Jet m[2][2];
    Mat2 values() const {
        return Mat2{{{m[0][0].value(), m[0][1].value()}, {m[1][0].value(), m[1][1].value()}}};
    }
};

// A tangent frame vector carried both as an ambient jet field and through
// its components in the coordinate basis: X = a * f_u + b * f_v.
struct FrameField {
    JVec ambient;
    Jet a, b;
};

// First- and second-order geometry of an immersed surface at one parameter
// point, carried as two-variable jets: tangential derivatives of any derived
// scalar (angle function, curvatures, mean curvature components) are then
// exact Taylor coefficients instead of finite differences. `order` is the
// jet depth retained on second-order quantities.
struct GeometryJets {
    ProductAmbient pa;
    int order = 2;
    double u = 0.0, v = 0.0;

    JVec f;          // position, order + 2
    JVec fu, fv;     // coordinate velocities, order + 1
    Jet E, F, G, W2; // first fundamental form; W2 = EG - F^2

    JVec ddf[2][2]; // ambient covariant hessian of the position, order

    JVec T, N;    // tangential / normal part of the vertical field, order + 1
    Jet abs_T, abs_N;
    bool e1_along_T = false; // first frame vector aligned with T

    FrameField e1, e2;         // oriented orthonormal tangent frame, order + 1
    std::vector<JVec> normals; // orthonormal normal frame, order + 1

    std::vector<JetMat2> A; // shape operator per normal, order
    JVec H;                 // mean curvature vector, order
    Jet abs_H;
    Jet HN;      // <H, N>
    Jet lambda1; // <A_H e1, e1>, the first diagonal entry of the H-shape operator
    JetMat2 A_N; // shape operator of the (unnormalized) vertical normal part
    JetMat2 A_H; // <sigma(e_i, e_j), H>
    Jet K;       // intrinsic Gauss curvature (Brioschi), order - 1
};

GeometryJets geometry_jets(const ImmersionSpec& spec, double u, double v, int order = 2);

// sigma(e_i, e_j) as an ambient vector (values).
Vec second_fundamental(const GeometryJets& g, int i, int j);

// Gauss curvature assembled from the ambient curvature tensor and the second
// fundamental form; an extrinsic route independent of the intrinsic K.
double gauss_from_ambient(const GeometryJets& g);

// Derivative of a scalar jet field along frame vector i (0 or 1).
double frame_scalar_derivative(const GeometryJets& g, int i, const Jet& scalar);

// Ambient covariant derivative of a jet vector field along frame vector i;
// the result has the field's order minus one.
JVec frame_covariant(const GeometryJets& g, int i, const JVec& field);

// Component orthogonal to the surface (and to the model constraint).
JVec normal_part(const GeometryJets& g, const JVec& w);
Vec normal_part_values(const GeometryJets& g, const Vec& w);

// Connection coefficients (values): <nabla_{e_i} N_alpha, N_beta> in the
// normal bundle and <nabla_{e_i} e_j, e_k> on the tangent bundle.
double normal_connection(const GeometryJets& g, int i, int alpha, int beta);
double tangent_connection(const GeometryJets& g, int i, int j, int k);

// Normal frame adapted to the mean curvature vector: {H/|H|, unit normal
// part of the vertical field, orthogonal complement}, with the shape
// operator expressed in it. Degenerate directions are skipped and filled
// from the generic frame; flags record what was available.
struct AdaptedNormalFrame {
    bool ok = false;                // |H| was nondegenerate
    bool second_is_vertical = false; // slot 1 is the unit normal part of xi
    std::vector<Vec> normals;       // values
    std::vector<Mat2> shape;        // shape operator per adapted normal
};
AdaptedNormalFrame adapted_normal_frame(const GeometryJets& g);

} // namespace helix

#endif
