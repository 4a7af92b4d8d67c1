#ifndef HELIX_VERIFY_HPP
#define HELIX_VERIFY_HPP

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "helix/immersion.hpp"

namespace helix {

// Residual tolerance ladder. `exact` bounds quantities that vanish to
// rounding, `closed` bounds jet-based residuals on closed-form surfaces,
// `reconstructed` bounds surfaces evaluated through frame flows or
// interpolated grids as well as every identity built from third derivatives,
// and `angle` bounds the |T| spread of the constant-angle test. `scale`
// loosens every bound uniformly; values below 1 are rejected so scripted
// overrides can never tighten a bound past its measured noise floor.
struct Tolerances {
    double exact = 1e-9;
    double closed = 1e-6;
    double reconstructed = 1e-5;
    double angle = 1e-6;
    double scale = 1.0;

    double apply(double base) const;
    // Structure-equation tier for a surface of the given construction kind.
    double structure(const std::string& kind) const;
};

struct CheckResult {
    double max = 0.0;  // worst |residual| over the probe grid
    double mean = 0.0; // mean |residual| over the probe grid
    double tol = 0.0;
    bool pass = true;
    bool applicable = true; // false when the check's precondition fails
};

struct ScalarStats {
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;

    // Worst absolute value seen; the classifier's notion of "is zero".
    double magnitude() const;
};

// Everything measured on one surface over one probe grid: named residual
// checks (pass/fail against the tolerance ladder) plus descriptive scalar
// statistics. Serialization order is fixed so identical inputs produce
// byte-identical reports.
struct ResidualReport {
    std::string kind;
    double c = 0.0;
    int n = 0;
    int nu = 0, nv = 0;
    std::vector<std::pair<std::string, CheckResult>> checks;
    std::vector<std::pair<std::string, ScalarStats>> scalars;

    const CheckResult* find_check(const std::string& name) const;
    const ScalarStats* find_scalar(const std::string& name) const;
    // Throwing accessors for checks/scalars that must exist.
    const CheckResult& check(const std::string& name) const;
    const ScalarStats& scalar(const std::string& name) const;
    // True when every applicable validity check passed. The two descriptor
    // checks (pseudo_umbilical, ar_form) are excluded: their booleans select
    // a classification branch and say nothing about whether the surface's
    // geometry is consistent.
    bool all_pass() const;

    nlohmann::ordered_json to_json() const;
};

// Probes the surface on an nu x nv lattice (cell-centered in the declared
// parameter ranges) and evaluates:
//   helix              spread of |T| (max - min over the grid)
//   pmc                max_i |normal part of the derivative of H along e_i|
//   gauss_equation     intrinsic K vs ambient curvature + shape-operator K
//   codazzi_equation   alternated normal derivative of sigma vs ambient term
//   ricci_equation     normal-bundle curvature vs shape commutator + ambient
//   pseudo_umbilical   eigenvalue spread of A_H (0 iff A_H is a multiple of id)
//   lambda1_gradient, hn_gradient, k_identity, k_gradient, trace_balance
//                      derivative identities that hold on constant-angle
//                      surfaces with parallel mean curvature and 0 < |T| < 1;
//                      probes too close to |T| = 0 or |T| = 1 are skipped and
//                      the checks are marked inapplicable if no probe qualifies
//   ar_form            max(|Q(e1,e1) - Q(e2,e2)|, |Q(e1,e2)|) for the quadratic
//                      form Q(X,Y) = 2<sigma(X,Y),H> - c<X,xi><Y,xi>; only for
//                      surfaces in a 2-dimensional space-form factor
// Scalars: abs_T, abs_H, K, lambda1, HN, case4_combination = 4|H|^2 + c|T|^2,
// plus beta (angle between H and N, where both are nonzero) and lambda (half
// the eigenvalue spread of the third adapted shape operator, where a 3-normal
// adapted frame exists).
ResidualReport run_checks(const ImmersionSpec& spec, int nu = 33, int nv = 33,
                          const Tolerances& tol = Tolerances{});

struct Classification {
    std::string label;
    nlohmann::ordered_json diagnostics;
};

// Decision tree over the report:
//   helix or pmc failed                      -> "not-pmc-helix"
//   |H| = 0                                  -> "minimal"
//   A_H a multiple of the identity           -> "pseudo-umbilical"
//   |T| = 0, H-direction umbilical           -> "case1"   (horizontal, H umbilic)
//   |T| = 0 otherwise                        -> "case2"   (horizontal)
//   |T| = 1                                  -> "case3"   (vertical cylinder)
//   c < 0 and 4|H|^2 + c|T|^2 = 0            -> "case4"
//   c > 0 and K = 0 and lambda1 = 0          -> "case5"
//   anything else                            -> "unclassified"
// with equalities read at the report's tolerances. Diagnostics carry the
// measured evidence for the chosen branch (or the distance to every branch
// when unclassified). The horizontal branches additionally probe the span of
// the second fundamental form to report the dimension of the smallest
// sub-ambient the surface could live in.
Classification classify_surface(const ImmersionSpec& spec, const ResidualReport& report,
                                const Tolerances& tol = Tolerances{});

} // namespace helix

#endif
