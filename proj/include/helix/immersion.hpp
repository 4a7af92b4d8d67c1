#ifndef HELIX_IMMERSION_HPP
#define HELIX_IMMERSION_HPP

#include <array>
#include <functional>
#include <string>

#include <json.hpp>

#include "helix/ambient.hpp"
#include "helix/jetvec.hpp"

namespace helix {

// A parametrized surface patch in M^n(c) x R. `eval` returns the two-variable
// coordinate jets of the immersion at (u, v) at any order up to 4; everything
// downstream (fundamental forms, residual checks, classification) consumes
// only this interface, so closed-form patches, frame-integrated patches and
// interpolated grids are interchangeable.
struct ImmersionSpec {
    ProductAmbient pa;
    std::array<double, 2> u_range = {0.0, 6.283185307179586};
    std::array<double, 2> v_range = {0.0, 6.283185307179586};
    bool periodic_u = false;
    bool periodic_v = false;
    std::string kind;
    nlohmann::json params; // construction parameters, echoed into documents
    std::function<JVec(double u, double v, int order)> eval;
};

// Domain-checked jet evaluation (slight overshoot beyond the declared ranges
// is allowed for finite-difference probes; far outside raises DomainError).
JVec surface_jets(const ImmersionSpec& spec, double u, double v, int order);

// --- closed-form constructions ---

// Totally geodesic horizontal slice M^2(c) x {t0}.
ImmersionSpec make_slice(double c, double t0);

// Vertical cylinder over a circle of geodesic curvature kappa in M^n(c).
ImmersionSpec make_vertical_cylinder(double c, int n, double kappa);

// Helical product torus in S^3(c) x R: unit-speed angular coordinates on two
// orthogonal circles of radii r1, r2 (r1^2 + r2^2 = 1/c) with the first
// factor sheared vertically at the given slope. slope = 0 is the horizontal
// cmc torus.
ImmersionSpec make_torus_helix(double c, double r1, double r2, double slope);
ImmersionSpec make_cmc_torus(double c, double r1, double r2);

// Totally geodesic equator of the geodesic hypersphere of polar radius rho
// in S^4(c), horizontal in S^4(c) x R.
ImmersionSpec make_geodesic_sphere_in_small_sphere(double c, double rho);

// Vertical graph t = u over a geodesic strip of S^2(c): a surface whose
// tangent planes meet the vertical field at a varying angle.
ImmersionSpec make_graph_strip(double c);

// --- sampled grids ---

// Write the surface's position grid as CSV: header u,v,x0,...,x{d-1},
// u-major rows, 17 significant digits.
void write_grid_csv(const ImmersionSpec& spec, int nu, int nv, const std::string& path);

// Load a position grid written by write_grid_csv (or any uniform lattice in
// the same layout) and present it as an immersion via centered degree-4
// tensor-product interpolation. Values reproduce smooth data to ~h^5; k-th
// derivatives lose a factor h^k as usual for polynomial interpolation, so
// residual checks on such grids carry a documented interpolation floor.
ImmersionSpec load_grid_csv(double c, int n, const std::string& path);

} // namespace helix

#endif
