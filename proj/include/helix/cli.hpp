#ifndef HELIX_CLI_HPP
#define HELIX_CLI_HPP

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "helix/curve.hpp"
#include "helix/immersion.hpp"
#include "helix/verify.hpp"

namespace helix {

// A surface document resolved into an evaluable patch plus the probe grid
// and tolerance settings it requests.
//
// Document schema (a JSON object; unknown keys are rejected at every level):
//   {
//     "ambient":    {"c": number, "n": integer in [2, 4]},
//     "surface":    {"kind": string, "params": object}   for a construction,
//                or {"grid_csv": path string}            for sampled data,
//     "grid":       {"nu": integer >= 4, "nv": integer >= 4},
//     "tolerances": optional object with any of
//                   "exact", "closed", "reconstructed", "angle", "scale";
//                   each override may only loosen its default.
//   }
// surface.params must not repeat "c" or "n": the ambient block is the single
// source of truth and is injected into the construction. A relative
// "grid_csv" path is resolved against base_dir (the file loader passes the
// document's own directory).
struct SurfaceJob {
    ImmersionSpec spec;
    int nu = 33;
    int nv = 33;
    Tolerances tol;
};

SurfaceJob load_surface_document(const nlohmann::json& doc,
                                 const std::string& base_dir = ".");
SurfaceJob load_surface_document_file(const std::string& path);

// A curve document resolved into an arc-length curve plus its sample count:
//   {"ambient": {"c", "n"},
//    "curve": {"kind": string, "params": object},
//    "samples": optional integer >= 2 (default 33)}.
// Curve kinds and their params:
//   "circle"                {"kappa"}                      canonical space-form circle
//   "vertical_line"         {}                             flow line of the vertical field
//   "latitude_circle"       {"phi"}                        c > 0, n = 2
//   "prescribed_curvature"  {"kappa0","amplitude","frequency"}  c > 0, n = 2
//   "case5_gamma1"          {"H","T"}                      c > 0, n = 4
//   "case5_gamma2"          {"H","T"}                      c > 0, n = 4
struct CurveJob {
    CurveSpec curve;
    int samples = 33;
};

CurveJob load_curve_document(const nlohmann::json& doc);
CurveJob load_curve_document_file(const std::string& path);

// Batch driver behind the helixctl binary. Subcommands:
//   build     construct a surface from flags, write its sample grid CSV and
//             a companion JSON document (CSV stem + ".json") that verify,
//             classify and sweep accept;
//   verify    run the residual checks of a surface document, emit the
//             report JSON (stdout or -o);
//   classify  print the classification label and its diagnostics JSON;
//   frenet    print the curvature table CSV (s, kappa1, kappa2, ...) of a
//             curve document;
//   sweep     repeat verify over a 1- or 2-parameter lattice, emit
//             long-form CSV (one row per lattice point and check).
// Exit codes: 0 command succeeded and every check passed; 1 at least one
// check failed (or classify produced a rejection label); 2 invalid input.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace helix

#endif
