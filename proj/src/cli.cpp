#include "helix/cli.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "helix/errors.hpp"
#include "helix/reconstruct.hpp"

namespace helix {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// --- document plumbing -----------------------------------------------------

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return it.key() == k; });
        if (!known) throw ParameterError(where + ": unknown key \"" + it.key() + "\"");
    }
}

const json& member(const json& obj, const std::string& where, const char* key) {
    if (!obj.is_object()) throw ParameterError(where + " must be a JSON object");
    if (!obj.contains(key)) throw ParameterError(where + ": missing key \"" + key + "\"");
    return obj.at(key);
}

double number_at(const json& obj, const std::string& where, const char* key) {
    const json& v = member(obj, where, key);
    if (!v.is_number()) throw ParameterError(where + "." + key + " must be a number");
    return v.get<double>();
}

int int_at(const json& obj, const std::string& where, const char* key, int lo, int hi) {
    const json& v = member(obj, where, key);
    if (!v.is_number_integer())
        throw ParameterError(where + "." + key + " must be an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi)
        throw ParameterError(where + "." + key + " must lie in [" + std::to_string(lo) +
                             ", " + std::to_string(hi) + "]");
    return static_cast<int>(x);
}

std::string num17(double x) {
    std::ostringstream ss;
    ss << std::setprecision(17) << x;
    return ss.str();
}

Tolerances parse_tolerances(const json& obj) {
    if (!obj.is_object()) throw ParameterError("tolerances must be a JSON object");
    reject_unknown(obj, "tolerances", {"exact", "closed", "reconstructed", "angle", "scale"});
    const Tolerances defaults;
    Tolerances tol;
    auto take = [&](const char* key, double Tolerances::*field) {
        if (!obj.contains(key)) return;
        const double v = number_at(obj, "tolerances", key);
        if (v < defaults.*field)
            throw ParameterError(std::string("tolerances.") + key +
                                 " may only loosen the default " + num17(defaults.*field));
        tol.*field = v;
    };
    take("exact", &Tolerances::exact);
    take("closed", &Tolerances::closed);
    take("reconstructed", &Tolerances::reconstructed);
    take("angle", &Tolerances::angle);
    take("scale", &Tolerances::scale);
    return tol;
}

json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open document: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParameterError(path + ": " + e.what());
    }
}

} // namespace

SurfaceJob load_surface_document(const json& doc, const std::string& base_dir) {
    if (!doc.is_object()) throw ParameterError("document root must be a JSON object");
    reject_unknown(doc, "document", {"ambient", "surface", "grid", "tolerances"});

    const json& ambient = member(doc, "document", "ambient");
    if (!ambient.is_object()) throw ParameterError("ambient must be a JSON object");
    reject_unknown(ambient, "ambient", {"c", "n"});
    const double c = number_at(ambient, "ambient", "c");
    const int n = int_at(ambient, "ambient", "n", 2, 4);

    const json& surface = member(doc, "document", "surface");
    if (!surface.is_object()) throw ParameterError("surface must be a JSON object");

    SurfaceJob job;
    if (surface.contains("grid_csv")) {
        reject_unknown(surface, "surface", {"grid_csv"});
        const json& p = surface.at("grid_csv");
        if (!p.is_string()) throw ParameterError("surface.grid_csv must be a path string");
        std::filesystem::path path(p.get<std::string>());
        if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
        job.spec = load_grid_csv(c, n, path.string());
    } else {
        reject_unknown(surface, "surface", {"kind", "params"});
        const json& k = member(surface, "surface", "kind");
        if (!k.is_string()) throw ParameterError("surface.kind must be a string");
        const std::string kind = k.get<std::string>();
        json params = surface.contains("params") ? surface.at("params") : json::object();
        if (!params.is_object()) throw ParameterError("surface.params must be a JSON object");
        if (params.contains("c") || params.contains("n"))
            throw ParameterError(
                "surface.params must not repeat \"c\" or \"n\"; they belong in ambient");
        params["c"] = c;
        if (kind == "vertical_cylinder" || kind == "case3" || kind == "case4" ||
            kind == "case5") {
            params["n"] = n;
        }
        job.spec = build_surface(kind, params);
        if (job.spec.pa.sf.n != n)
            throw ParameterError("surface kind \"" + kind + "\" lives in n = " +
                                 std::to_string(job.spec.pa.sf.n) + ", but ambient.n = " +
                                 std::to_string(n));
    }

    const json& grid = member(doc, "document", "grid");
    if (!grid.is_object()) throw ParameterError("grid must be a JSON object");
    reject_unknown(grid, "grid", {"nu", "nv"});
    job.nu = int_at(grid, "grid", "nu", 4, 1024);
    job.nv = int_at(grid, "grid", "nv", 4, 1024);

    if (doc.contains("tolerances")) job.tol = parse_tolerances(doc.at("tolerances"));
    return job;
}

SurfaceJob load_surface_document_file(const std::string& path) {
    const std::string dir = std::filesystem::path(path).parent_path().string();
    return load_surface_document(parse_json_file(path), dir.empty() ? "." : dir);
}

CurveJob load_curve_document(const json& doc) {
    if (!doc.is_object()) throw ParameterError("document root must be a JSON object");
    reject_unknown(doc, "document", {"ambient", "curve", "samples"});

    const json& ambient = member(doc, "document", "ambient");
    if (!ambient.is_object()) throw ParameterError("ambient must be a JSON object");
    reject_unknown(ambient, "ambient", {"c", "n"});
    const double c = number_at(ambient, "ambient", "c");
    const int n = int_at(ambient, "ambient", "n", 2, 4);

    const json& curve = member(doc, "document", "curve");
    if (!curve.is_object()) throw ParameterError("curve must be a JSON object");
    reject_unknown(curve, "curve", {"kind", "params"});
    const json& k = member(curve, "curve", "kind");
    if (!k.is_string()) throw ParameterError("curve.kind must be a string");
    const std::string kind = k.get<std::string>();
    json params = curve.contains("params") ? curve.at("params") : json::object();
    if (!params.is_object()) throw ParameterError("curve.params must be a JSON object");
    if (params.contains("c") || params.contains("n"))
        throw ParameterError(
            "curve.params must not repeat \"c\" or \"n\"; they belong in ambient");

    CurveJob job;
    if (doc.contains("samples")) job.samples = int_at(doc, "document", "samples", 2, 100000);

    const SpaceForm sf = SpaceForm::make(c, n);
    auto p = [&](const char* key) { return number_at(params, "curve.params", key); };
    if (kind == "circle") {
        reject_unknown(params, "curve.params", {"kappa"});
        job.curve = spaceform_circle_canonical(sf, p("kappa"));
    } else if (kind == "vertical_line") {
        reject_unknown(params, "curve.params", {});
        ProductAmbient pa{sf};
        Vec base(pa.dim(), 0.0);
        if (pa.curved()) base[0] = sf.radius();
        job.curve = vertical_line(pa, AmbientPoint{base});
    } else if (kind == "latitude_circle") {
        reject_unknown(params, "curve.params", {"phi"});
        job.curve = latitude_circle(sf, p("phi"));
    } else if (kind == "prescribed_curvature") {
        reject_unknown(params, "curve.params", {"kappa0", "amplitude", "frequency"});
        job.curve = prescribed_curvature_curve(sf, p("kappa0"), p("amplitude"), p("frequency"));
    } else if (kind == "case5_gamma1" || kind == "case5_gamma2") {
        reject_unknown(params, "curve.params", {"H", "T"});
        if (n != 4)
            throw ParameterError("curve kind \"" + kind + "\" lives in n = 4, but ambient.n = " +
                                 std::to_string(n));
        job.curve = (kind == "case5_gamma1") ? case5_gamma1(c, p("H"), p("T"))
                                             : case5_gamma2(c, p("H"), p("T"));
    } else {
        throw ParameterError("unknown curve kind \"" + kind + "\"");
    }
    return job;
}

CurveJob load_curve_document_file(const std::string& path) {
    return load_curve_document(parse_json_file(path));
}

namespace {

// --- subcommand workers ------------------------------------------------------

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ParameterError("cannot open output file: " + path);
    out << text;
    if (!out) throw ParameterError("failed while writing: " + path);
}

struct BuildOptions {
    int case_id = 0;
    std::string kind;
    double c = 0.0;
    std::optional<int> n;
    std::optional<double> H, T, kappa, r1, r2, slope, rho, t0;
    bool mirror = false;
    int nu = 65;
    int nv = 65;
    std::string output;
};

int cmd_build(const BuildOptions& opt, std::ostream& out) {
    if (opt.case_id != 0 && !opt.kind.empty())
        throw ParameterError("give either --case or --kind, not both");
    const std::string kind =
        opt.case_id != 0 ? "case" + std::to_string(opt.case_id) : opt.kind;
    if (kind.empty()) throw ParameterError("build needs --case or --kind");

    json params = json::object();
    params["c"] = opt.c;
    if (opt.n) params["n"] = *opt.n;
    auto set = [&params](const char* key, const std::optional<double>& v) {
        if (v) params[key] = *v;
    };
    set("H", opt.H);
    set("T", opt.T);
    set("kappa", opt.kappa);
    set("r1", opt.r1);
    set("r2", opt.r2);
    set("slope", opt.slope);
    set("rho", opt.rho);
    set("t0", opt.t0);
    if (opt.mirror) params["mirror"] = true;

    ImmersionSpec spec = build_surface(kind, params);
    write_grid_csv(spec, opt.nu, opt.nv, opt.output);

    ordered_json doc;
    doc["ambient"] = {{"c", spec.pa.c()}, {"n", spec.pa.sf.n}};
    ordered_json echoed = ordered_json::object();
    for (auto it = spec.params.begin(); it != spec.params.end(); ++it) {
        if (it.key() == "c" || it.key() == "n") continue;
        echoed[it.key()] = it.value();
    }
    doc["surface"] = {{"kind", kind}, {"params", echoed}};
    doc["grid"] = {{"nu", opt.nu}, {"nv", opt.nv}};

    std::filesystem::path doc_path(opt.output);
    doc_path.replace_extension(".json");
    write_text_file(doc_path.string(), doc.dump(2) + "\n");
    out << "wrote " << opt.output << "\n";
    out << "wrote " << doc_path.string() << "\n";
    return 0;
}

struct VerifyOptions {
    std::string document;
    std::string output;
    double tol_scale = 1.0;
    std::optional<int> nu, nv;
};

SurfaceJob load_verify_job(const VerifyOptions& opt) {
    if (opt.tol_scale < 1.0) throw ParameterError("--tol-scale must be >= 1");
    SurfaceJob job = load_surface_document_file(opt.document);
    job.tol.scale *= opt.tol_scale;
    if (opt.nu) job.nu = *opt.nu;
    if (opt.nv) job.nv = *opt.nv;
    return job;
}

int cmd_verify(const VerifyOptions& opt, std::ostream& out) {
    SurfaceJob job = load_verify_job(opt);
    ResidualReport report = run_checks(job.spec, job.nu, job.nv, job.tol);
    const std::string text = report.to_json().dump(2) + "\n";
    if (opt.output.empty())
        out << text;
    else
        write_text_file(opt.output, text);
    return report.all_pass() ? 0 : 1;
}

int cmd_classify(const VerifyOptions& opt, std::ostream& out) {
    SurfaceJob job = load_verify_job(opt);
    ResidualReport report = run_checks(job.spec, job.nu, job.nv, job.tol);
    Classification cls = classify_surface(job.spec, report, job.tol);
    out << cls.label << "\n" << cls.diagnostics.dump(2) << "\n";
    return (cls.label == "not-pmc-helix" || cls.label == "unclassified") ? 1 : 0;
}

struct FrenetOptions {
    std::string curve;
    std::string output;
    std::optional<int> samples;
};

int cmd_frenet(const FrenetOptions& opt, std::ostream& out) {
    CurveJob job = load_curve_document_file(opt.curve);
    if (opt.samples) job.samples = *opt.samples;

    const int m = job.samples;
    const double a = job.curve.range[0];
    const double b = job.curve.range[1];
    std::vector<double> ss(m);
    std::vector<FrenetData> rows(m);
    size_t ncols = 0;
    for (int i = 0; i < m; ++i) {
        ss[i] = a + (b - a) * static_cast<double>(i) / (m - 1);
        rows[i] = frenet_apparatus(job.curve, ss[i]);
        ncols = std::max(ncols, rows[i].curvatures.size());
    }

    std::ostringstream csv;
    csv << "s";
    for (size_t j = 0; j < ncols; ++j) csv << ",kappa" << (j + 1);
    csv << "\n";
    for (int i = 0; i < m; ++i) {
        csv << num17(ss[i]);
        for (size_t j = 0; j < ncols; ++j) {
            const double kappa = j < rows[i].curvatures.size() ? rows[i].curvatures[j] : 0.0;
            csv << "," << num17(kappa);
        }
        csv << "\n";
    }
    if (opt.output.empty())
        out << csv.str();
    else
        write_text_file(opt.output, csv.str());
    return 0;
}

struct SweepOptions {
    std::string document;
    std::vector<std::string> axes;
    std::string output;
    double tol_scale = 1.0;
    int jobs = 0;
};

struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

SweepAxis parse_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ParameterError("--param expects name=value or name=start:stop:count, got \"" +
                             text + "\"");
    SweepAxis axis;
    axis.name = text.substr(0, eq);
    if (axis.name == "n" || axis.name == "mirror" || axis.name == "kind" ||
        axis.name == "grid_csv")
        throw ParameterError("cannot sweep \"" + axis.name + "\"");

    std::vector<std::string> parts;
    std::stringstream rhs(text.substr(eq + 1));
    for (std::string piece; std::getline(rhs, piece, ':');) parts.push_back(piece);
    try {
        if (parts.size() == 1) {
            axis.values = {std::stod(parts[0])};
        } else if (parts.size() == 3) {
            const double start = std::stod(parts[0]);
            const double stop = std::stod(parts[1]);
            const long count = std::stol(parts[2]);
            if (count < 1 || count > 10000)
                throw ParameterError("--param count must lie in [1, 10000]");
            for (long i = 0; i < count; ++i)
                axis.values.push_back(count == 1 ? start
                                                 : start + (stop - start) * static_cast<double>(i) /
                                                               static_cast<double>(count - 1));
        } else {
            throw ParameterError("--param expects name=value or name=start:stop:count, got \"" +
                                 text + "\"");
        }
    } catch (const std::invalid_argument&) {
        throw ParameterError("--param has a non-numeric field in \"" + text + "\"");
    } catch (const std::out_of_range&) {
        throw ParameterError("--param has an out-of-range field in \"" + text + "\"");
    }
    return axis;
}

int cmd_sweep(const SweepOptions& opt, std::ostream& out) {
    if (opt.tol_scale < 1.0) throw ParameterError("--tol-scale must be >= 1");
    std::vector<SweepAxis> axes;
    for (const std::string& text : opt.axes) axes.push_back(parse_axis(text));
    if (axes.empty() || axes.size() > 2)
        throw ParameterError("sweep takes one or two --param axes");

    const json base = parse_json_file(opt.document);
    if (base.contains("surface") && base.at("surface").is_object() &&
        base.at("surface").contains("grid_csv"))
        throw ParameterError("sweep needs a constructed surface (kind/params), not grid_csv");
    const std::string base_dir =
        std::filesystem::path(opt.document).parent_path().string();

    // Lattice points in row-major order: the first axis is the slow index.
    std::vector<std::vector<double>> points;
    if (axes.size() == 1) {
        for (double x : axes[0].values) points.push_back({x});
    } else {
        for (double x : axes[0].values)
            for (double y : axes[1].values) points.push_back({x, y});
    }

    struct PointResult {
        bool all_pass = true;
        std::string rows;
    };
    auto run_point = [&](const std::vector<double>& values) {
        json doc = base;
        for (size_t j = 0; j < axes.size(); ++j) {
            if (axes[j].name == "c")
                doc["ambient"]["c"] = values[j];
            else
                doc["surface"]["params"][axes[j].name] = values[j];
        }
        SurfaceJob job = load_surface_document(doc, base_dir.empty() ? "." : base_dir);
        job.tol.scale *= opt.tol_scale;
        ResidualReport report = run_checks(job.spec, job.nu, job.nv, job.tol);

        PointResult result;
        result.all_pass = report.all_pass();
        std::ostringstream rows;
        for (const auto& [name, check] : report.checks) {
            for (double v : values) rows << num17(v) << ",";
            rows << name << "," << num17(check.max) << "," << num17(check.mean) << ","
                 << num17(check.tol) << "," << (check.pass ? 1 : 0) << ","
                 << (check.applicable ? 1 : 0) << "\n";
        }
        result.rows = rows.str();
        return result;
    };

    // Fan verifications out across a bounded pool; a single aggregator then
    // writes results in lattice order, so output is scheduling-independent.
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const size_t pool = opt.jobs > 0 ? static_cast<size_t>(opt.jobs)
                                     : std::min<size_t>(hw, points.size());
    std::vector<PointResult> results(points.size());
    for (size_t start = 0; start < points.size(); start += pool) {
        const size_t stop = std::min(points.size(), start + pool);
        std::vector<std::future<PointResult>> batch;
        for (size_t i = start; i < stop; ++i)
            batch.push_back(std::async(std::launch::async, run_point, points[i]));
        for (size_t i = start; i < stop; ++i) results[i] = batch[i - start].get();
    }

    std::ostringstream csv;
    for (const SweepAxis& axis : axes) csv << axis.name << ",";
    csv << "check,max,mean,tol,pass,applicable\n";
    bool every_point_passed = true;
    for (const PointResult& result : results) {
        every_point_passed = every_point_passed && result.all_pass;
        csv << result.rows;
    }
    if (opt.output.empty())
        out << csv.str();
    else
        write_text_file(opt.output, csv.str());
    return every_point_passed ? 0 : 1;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"helixctl: construct, verify and classify constant-angle surfaces with "
                 "parallel mean curvature in S^n x R and H^n x R"};
    app.require_subcommand(1);
    int rc = 0;

    BuildOptions build_opt;
    CLI::App* build = app.add_subcommand(
        "build", "Construct a surface; write its grid CSV and a companion JSON document");
    build->add_option("--case", build_opt.case_id, "Shortcut for --kind case3|case4|case5")
        ->check(CLI::IsMember({3, 4, 5}));
    build->add_option("--kind", build_opt.kind,
                      "Surface kind: slice, vertical_cylinder, case3, case4, case5, "
                      "torus_helix, cmc_torus_in_S3, geodesic_sphere_in_small_sphere, "
                      "graph_strip");
    build->add_option("--c", build_opt.c, "Sectional curvature of the space-form factor")
        ->required();
    build->add_option("--n", build_opt.n, "Space-form dimension (2-4)")->check(CLI::Range(2, 4));
    build->add_option("--H", build_opt.H, "Mean curvature norm |H|");
    build->add_option("--T", build_opt.T, "Tangential vertical norm |T|");
    build->add_option("--kappa", build_opt.kappa, "Generator circle curvature (vertical_cylinder)");
    build->add_option("--r1", build_opt.r1, "First torus radius");
    build->add_option("--r2", build_opt.r2, "Second torus radius");
    build->add_option("--slope", build_opt.slope, "Vertical slope of the torus helix");
    build->add_option("--rho", build_opt.rho, "Polar radius of the geodesic sphere");
    build->add_option("--t0", build_opt.t0, "Height of the horizontal slice");
    build->add_flag("--mirror", build_opt.mirror,
                    "Mirror branch with the opposite mean-curvature/vertical angle");
    build->add_option("--nu", build_opt.nu, "Grid samples along u")->check(CLI::Range(5, 4097));
    build->add_option("--nv", build_opt.nv, "Grid samples along v")->check(CLI::Range(5, 4097));
    build->add_option("-o,--output", build_opt.output, "Grid CSV output path")->required();
    build->callback([&] { rc = cmd_build(build_opt, out); });

    VerifyOptions verify_opt;
    CLI::App* verify = app.add_subcommand(
        "verify", "Run the residual checks of a surface document; emit the report JSON");
    verify->add_option("document", verify_opt.document, "Surface document JSON path")->required();
    verify->add_option("-o,--output", verify_opt.output, "Report path (default: stdout)");
    verify->add_option("--tol-scale", verify_opt.tol_scale,
                       "Loosen every tolerance by this factor (>= 1)");
    verify->add_option("--nu", verify_opt.nu, "Override the document's probe count along u")
        ->check(CLI::Range(4, 1024));
    verify->add_option("--nv", verify_opt.nv, "Override the document's probe count along v")
        ->check(CLI::Range(4, 1024));
    verify->callback([&] { rc = cmd_verify(verify_opt, out); });

    VerifyOptions classify_opt;
    CLI::App* classify = app.add_subcommand(
        "classify", "Print the classification label and diagnostics of a surface document");
    classify->add_option("document", classify_opt.document, "Surface document JSON path")
        ->required();
    classify->add_option("--tol-scale", classify_opt.tol_scale,
                         "Loosen every tolerance by this factor (>= 1)");
    classify->add_option("--nu", classify_opt.nu, "Override the document's probe count along u")
        ->check(CLI::Range(4, 1024));
    classify->add_option("--nv", classify_opt.nv, "Override the document's probe count along v")
        ->check(CLI::Range(4, 1024));
    classify->callback([&] { rc = cmd_classify(classify_opt, out); });

    FrenetOptions frenet_opt;
    CLI::App* frenet = app.add_subcommand(
        "frenet", "Print the curvature table CSV (s, kappa1, kappa2, ...) of a curve document");
    frenet->add_option("--curve", frenet_opt.curve, "Curve document JSON path")->required();
    frenet->add_option("-o,--output", frenet_opt.output, "CSV path (default: stdout)");
    frenet->add_option("--samples", frenet_opt.samples, "Number of arc-length samples")
        ->check(CLI::Range(2, 100000));
    frenet->callback([&] { rc = cmd_frenet(frenet_opt, out); });

    SweepOptions sweep_opt;
    CLI::App* sweep = app.add_subcommand(
        "sweep", "Repeat verify over a parameter lattice; emit long-form CSV");
    sweep->add_option("document", sweep_opt.document, "Base surface document JSON path")
        ->required();
    sweep->add_option("--param", sweep_opt.axes,
                      "Axis as name=value or name=start:stop:count (repeat for a 2-axis lattice)")
        ->required();
    sweep->add_option("-o,--output", sweep_opt.output, "CSV path (default: stdout)");
    sweep->add_option("--tol-scale", sweep_opt.tol_scale,
                      "Loosen every tolerance by this factor (>= 1)");
    sweep->add_option("--jobs", sweep_opt.jobs, "Concurrent verifications (default: hardware)")
        ->check(CLI::Range(1, 256));
    sweep->callback([&] { rc = cmd_sweep(sweep_opt, out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}

} // namespace helix
