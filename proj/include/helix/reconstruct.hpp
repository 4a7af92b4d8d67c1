#ifndef HELIX_RECONSTRUCT_HPP
#define HELIX_RECONSTRUCT_HPP

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "helix/curve.hpp"
#include "helix/immersion.hpp"

namespace helix {

// Constant-coefficient moving-frame data for a surface patch in M^n(c) x R:
// two tangent fields E1, E2 and codim normal fields N_1..N_k, together with
// the shape matrix of every normal, the tangent connection coefficients and
// the normal connection coefficients, all constant in the frame. Integrating
// the Gauss and Weingarten formulas as a first-order ODE in (position, frame)
// rebuilds the surface itself from this data.
struct FrameODEData {
    ProductAmbient pa;
    Vec p0;                  // initial point, flat model coordinates
    std::vector<Vec> frame0; // E1, E2, N_1..N_k at p0, orthonormal tangent vectors
    double Gamma[2][2][2] = {{{0}}}; // Gamma[i][j][l] = <nabla_{E_i} E_j, E_l>
    std::vector<Mat2> A;             // A[a](i,j) = <sigma(E_i, E_j), N_a>
    double Omega[2][3][3] = {{{0}}}; // Omega[i][a][b] = <nabla^perp_{E_i} N_a, N_b>
    double t_norm = 0.0;             // |T| = <E1, xi> at p0, echoed into reports
    double h_norm = 0.0;             // |H|, echoed into reports

    int codim() const { return static_cast<int>(A.size()); }

    // Structural sanity: p0 on the manifold, frame tangent and orthonormal,
    // shape matrices symmetric, connection coefficients antisymmetric, and
    // <E1, xi> equal to t_norm. Throws PreconditionError on violation.
    void validate() const;
};

// Residuals of the three structure equations evaluated algebraically on the
// constant data (frame inner products at p0 against the curvature of the
// product metric). Zero residuals mean the data is integrable to a surface.
struct CompatibilityReport {
    double gauss = 0.0;
    double codazzi = 0.0;
    double ricci = 0.0;
    double max() const { return std::max(gauss, std::max(codazzi, ricci)); }
};
CompatibilityReport compatibility_check(const FrameODEData& data);

// Position and frame transported along the frame flows.
struct FlowState {
    Vec p;
    std::vector<Vec> frame;
};

FlowState initial_state(const FrameODEData& data);

// Worst deviations seen along integrated trajectories. Drift is monitored,
// never repaired: re-orthonormalization would hide integrator defects.
struct FlowDriftStats {
    double frame_gram_drift = 0.0; // max |<f_i,f_j> - delta_ij| over steps
    double manifold_drift = 0.0;   // max constraint residual over steps
};

// Classical fixed-step RK4 transport of (position, frame) along the flow of
// frame member `dir` (0 or 1) for signed parameter length `span`; the step
// count is ceil(|span| / max_step). Drift accumulates into *stats if given.
FlowState integrate_leg(const FrameODEData& data, const FlowState& start,
                        int dir, double span, double max_step,
                        FlowDriftStats* stats = nullptr);

// A rectangular lattice of integrated states: row-major with the t-index
// fastest, node (i, j) at parameters (s_i, t_j). Built by flowing E2 through
// p0 and E1 across each seed, so for non-commuting frames (s, t) are flow
// parameters rather than coordinates; every downstream check recomputes the
// geometry from positions alone and does not care.
struct SampledImmersion {
    ProductAmbient pa;
    int n_s = 0, n_t = 0;
    std::array<double, 2> s_range = {0.0, 0.0};
    std::array<double, 2> t_range = {0.0, 0.0};
    std::vector<FlowState> nodes;
    FlowDriftStats stats;
    nlohmann::json provenance;
};

// Integrates the full lattice. Requires compatibility_check max <= 1e-8 and
// throws IntegrationError (reporting the worst node) if either drift figure
// exceeds 1e-6 anywhere.
SampledImmersion integrate_frame(const FrameODEData& data, int n_s, int n_t,
                                 std::array<double, 2> s_range,
                                 std::array<double, 2> t_range,
                                 double max_step = 0.01);

// Positions of the lattice in the shared grid CSV layout (header u,v,x0,...,
// 17 significant digits, s-major with t fastest).
void write_sampled_csv(const SampledImmersion& sampled, const std::string& path);

// Jet-evaluable surface f(u, v) = flow_{E1}^u(flow_{E2}^v(p0)) over the frame
// flows. Evaluations are cached deterministically (fixed anchor spacing and
// fixed step counts), so results are independent of query order; derivatives
// up to total order 4 come from transported Taylor data, not interpolation.
ImmersionSpec flow_immersion(const FrameODEData& data,
                             std::array<double, 2> u_range,
                             std::array<double, 2> v_range,
                             double max_step = 0.01);

// --- gallery frame data ---

// Totally geodesic horizontal slice through the base point (|T| = 0, sigma = 0)
// in M^2(c) x R. A frame with constant connection coefficients has intrinsic
// curvature <= 0, so for c < 0 (horocycle-flow frame) the data is exactly
// integrable, while for c > 0 it deliberately is not: the c > 0 variant
// exercises leg transport and the integrability gate itself.
FrameODEData slice_frame_data(double c);

// Data with |H| = sqrt(-c) |T| / 2 in M^2(c) x R, c < 0: the unique branch
// with H parallel to N. `mirror` selects the opposite sign of <H, N>; the two
// are congruent under an ambient reflection.
FrameODEData case4_frame_data(double c, double t_norm, bool mirror = false);

// Data in M^4(c) x R, c > 0, with H orthogonal to N and third fundamental
// direction of strength lambda = sqrt(c (1 - |T|^2)).
FrameODEData case5_frame_data(double c, double h_norm, double t_norm);

// --- surface builders (closed form where available, frame flow otherwise) ---

// Vertical cylinder over a circle of curvature 2|H| in M^n(c).
ImmersionSpec build_case3(double c, int n, double h_norm);

// Frame-flow surface from case4_frame_data; requires c < 0, |T| in (0,1).
ImmersionSpec build_case4(double c, double t_norm, bool mirror = false);

// Frame-flow surface from case5_frame_data; requires c > 0, |H| > 0,
// |T| in (0,1).
ImmersionSpec build_case5(double c, double h_norm, double t_norm);

// Coordinate curves of the case-5 surface: u |-> f(u, 0) and v |-> f(0, v),
// both arc-length.
CurveSpec case5_gamma1(double c, double h_norm, double t_norm);
CurveSpec case5_gamma2(double c, double h_norm, double t_norm);

// Named comparison surfaces: "slice", "torus_helix", "cmc_torus_in_S3",
// "geodesic_sphere_in_small_sphere". Parameters are read from `params` by
// name; unknown keys are rejected.
ImmersionSpec build_control(const std::string& kind, const nlohmann::json& params);

// Master dispatcher over every buildable kind (the controls plus "graph_strip",
// "vertical_cylinder", "case3", "case4", "case5").
ImmersionSpec build_surface(const std::string& kind, const nlohmann::json& params);

} // namespace helix

#endif
