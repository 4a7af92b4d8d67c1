#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "helix/cli.hpp"
#include "helix/errors.hpp"
#include "helix/immersion.hpp"

using namespace helix;
using nlohmann::json;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("helixctl");
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliResult result;
    result.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    result.out = out.str();
    result.err = err.str();
    return result;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    REQUIRE(out.good());
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

json slice_doc(int nu = 9, int nv = 9) {
    return json{{"ambient", {{"c", 1.0}, {"n", 2}}},
                {"surface", {{"kind", "slice"}, {"params", {{"t0", 0.25}}}}},
                {"grid", {{"nu", nu}, {"nv", nv}}}};
}

json torus_helix_doc(double slope = 0.5) {
    const double r = 0.70710678118654752;
    return json{{"ambient", {{"c", 1.0}, {"n", 3}}},
                {"surface",
                 {{"kind", "torus_helix"},
                  {"params", {{"r1", r}, {"r2", r}, {"slope", slope}}}}},
                {"grid", {{"nu", 9}, {"nv", 9}}}};
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    for (std::string line; std::getline(ss, line);) lines.push_back(line);
    return lines;
}

} // namespace

TEST_CASE("surface documents are validated strictly") {
    SurfaceJob job = load_surface_document(slice_doc(17, 33));
    CHECK(job.spec.kind == "slice");
    CHECK(job.nu == 17);
    CHECK(job.nv == 33);
    CHECK(job.tol.closed == doctest::Approx(1e-6));

    json extra = slice_doc();
    extra["notes"] = "hello";
    CHECK_THROWS_AS(load_surface_document(extra), ParameterError);

    json no_ambient = slice_doc();
    no_ambient.erase("ambient");
    CHECK_THROWS_AS(load_surface_document(no_ambient), ParameterError);

    json dup_c = slice_doc();
    dup_c["surface"]["params"]["c"] = 1.0;
    CHECK_THROWS_AS(load_surface_document(dup_c), ParameterError);

    json wrong_n = slice_doc();
    wrong_n["ambient"]["n"] = 3;
    CHECK_THROWS_AS(load_surface_document(wrong_n), ParameterError);

    json tiny_grid = slice_doc();
    tiny_grid["grid"]["nu"] = 2;
    CHECK_THROWS_AS(load_surface_document(tiny_grid), ParameterError);

    json tightened = slice_doc();
    tightened["tolerances"] = {{"closed", 1e-7}};
    CHECK_THROWS_AS(load_surface_document(tightened), ParameterError);

    json loosened = slice_doc();
    loosened["tolerances"] = {{"closed", 2e-6}, {"scale", 3.0}};
    SurfaceJob loose_job = load_surface_document(loosened);
    CHECK(loose_job.tol.closed == doctest::Approx(2e-6));
    CHECK(loose_job.tol.scale == doctest::Approx(3.0));
}

TEST_CASE("grid documents resolve the csv path against the document directory") {
    std::filesystem::create_directories("cli_sub");
    write_grid_csv(make_slice(1.0, 0.0), 33, 33, "cli_sub/g.csv");
    json doc = {{"ambient", {{"c", 1.0}, {"n", 2}}},
                {"surface", {{"grid_csv", "g.csv"}}},
                {"grid", {{"nu", 9}, {"nv", 9}}}};
    write_file("cli_sub/doc.json", doc.dump(2));

    SurfaceJob job = load_surface_document_file("cli_sub/doc.json");
    CHECK(job.spec.kind == "grid");
    CHECK(job.spec.u_range[1] == doctest::Approx(6.283185307179586));

    json both = doc;
    both["surface"]["kind"] = "slice";
    CHECK_THROWS_AS(load_surface_document(both, "cli_sub"), ParameterError);

    std::filesystem::remove_all("cli_sub");
}

TEST_CASE("curve documents are validated strictly") {
    json doc = {{"ambient", {{"c", 1.0}, {"n", 4}}},
                {"curve",
                 {{"kind", "case5_gamma1"}, {"params", {{"H", 0.5}, {"T", 0.6}}}}},
                {"samples", 9}};
    CurveJob job = load_curve_document(doc);
    CHECK(job.samples == 9);
    CHECK(job.curve.arc_length);

    json wrong_n = doc;
    wrong_n["ambient"]["n"] = 2;
    CHECK_THROWS_AS(load_curve_document(wrong_n), ParameterError);

    json unknown_kind = doc;
    unknown_kind["curve"]["kind"] = "spiral";
    CHECK_THROWS_AS(load_curve_document(unknown_kind), ParameterError);

    json stray_param = doc;
    stray_param["curve"]["params"]["phi"] = 0.3;
    CHECK_THROWS_AS(load_curve_document(stray_param), ParameterError);
}

TEST_CASE("malformed documents exit with code 2 and a diagnostic") {
    write_file("cli_bad.json", "{ \"ambient\": [1,\n  nope }");
    CliResult bad = run({"verify", "cli_bad.json"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("line") != std::string::npos);

    json unknown = slice_doc();
    unknown["surprise"] = 1;
    write_file("cli_unknown.json", unknown.dump(2));
    CliResult rejected = run({"verify", "cli_unknown.json"});
    CHECK(rejected.code == 2);
    CHECK(rejected.err.find("surprise") != std::string::npos);

    CliResult missing = run({"verify", "cli_no_such_file.json"});
    CHECK(missing.code == 2);

    CliResult no_args = run({"verify"});
    CHECK(no_args.code == 2);

    std::remove("cli_bad.json");
    std::remove("cli_unknown.json");
}

TEST_CASE("verify emits a deterministic report and exit code 0 on a clean surface") {
    write_file("cli_slice.json", slice_doc().dump(2));

    CliResult direct = run({"verify", "cli_slice.json"});
    CHECK(direct.code == 0);
    json report = json::parse(direct.out);
    CHECK(report["kind"] == "slice");
    CHECK(report["checks"]["helix"]["pass"] == true);
    CHECK(report["checks"]["pmc"]["pass"] == true);
    CHECK(report["grid"]["nu"] == 9);

    CliResult first = run({"verify", "cli_slice.json", "-o", "cli_rep_a.json"});
    CliResult second = run({"verify", "cli_slice.json", "-o", "cli_rep_b.json"});
    CHECK(first.code == 0);
    CHECK(second.code == 0);
    CHECK(read_file("cli_rep_a.json") == read_file("cli_rep_b.json"));
    CHECK(read_file("cli_rep_a.json") == direct.out);

    CliResult resized = run({"verify", "cli_slice.json", "--nu", "7", "--nv", "5"});
    CHECK(json::parse(resized.out)["grid"]["nu"] == 7);
    CHECK(json::parse(resized.out)["grid"]["nv"] == 5);

    std::remove("cli_slice.json");
    std::remove("cli_rep_a.json");
    std::remove("cli_rep_b.json");
}

TEST_CASE("verify exits 1 when a check fails and --tol-scale can only loosen") {
    write_file("cli_torus_helix.json", torus_helix_doc().dump(2));

    CliResult failing = run({"verify", "cli_torus_helix.json"});
    CHECK(failing.code == 1);
    json report = json::parse(failing.out);
    CHECK(report["checks"]["helix"]["pass"] == true);
    CHECK(report["checks"]["pmc"]["pass"] == false);
    CHECK(report["checks"]["pmc"]["max"] == doctest::Approx(0.05412658773652741));

    CliResult tightened = run({"verify", "cli_torus_helix.json", "--tol-scale", "0.5"});
    CHECK(tightened.code == 2);

    CliResult loosened = run({"verify", "cli_torus_helix.json", "--tol-scale", "1e8"});
    CHECK(loosened.code == 0);
    CHECK(json::parse(loosened.out)["checks"]["pmc"]["pass"] == true);

    std::remove("cli_torus_helix.json");
}

TEST_CASE("classify prints the label first and rejection labels exit 1") {
    json case3 = {{"ambient", {{"c", 1.0}, {"n", 2}}},
                  {"surface", {{"kind", "case3"}, {"params", {{"H", 0.5}}}}},
                  {"grid", {{"nu", 9}, {"nv", 9}}}};
    write_file("cli_case3.json", case3.dump(2));
    CliResult accepted = run({"classify", "cli_case3.json"});
    CHECK(accepted.code == 0);
    std::vector<std::string> lines = split_lines(accepted.out);
    REQUIRE(!lines.empty());
    CHECK(lines[0] == "case3");
    json diag = json::parse(accepted.out.substr(accepted.out.find('\n')));
    CHECK(diag["generator_curvature"] == doctest::Approx(1.0));

    write_file("cli_torus_helix.json", torus_helix_doc().dump(2));
    CliResult rejected = run({"classify", "cli_torus_helix.json"});
    CHECK(rejected.code == 1);
    CHECK(split_lines(rejected.out)[0] == "not-pmc-helix");

    std::remove("cli_case3.json");
    std::remove("cli_torus_helix.json");
}

TEST_CASE("build writes a grid csv plus a document that verifies and classifies") {
    CliResult built = run({"build", "--case", "5", "--c", "1", "--H", "0.5", "--T", "0.6",
                           "--nu", "17", "--nv", "17", "-o", "cli_case5.csv"});
    CHECK(built.code == 0);
    CHECK(built.out.find("cli_case5.csv") != std::string::npos);
    CHECK(built.out.find("cli_case5.json") != std::string::npos);

    json doc = json::parse(read_file("cli_case5.json"));
    CHECK(doc["ambient"]["n"] == 4);
    CHECK(doc["surface"]["kind"] == "case5");
    CHECK(doc["surface"]["params"]["H"] == doctest::Approx(0.5));
    CHECK(doc["surface"]["params"].contains("c") == false);
    CHECK(doc["grid"]["nu"] == 17);

    // The CSV is a loadable lattice of the same immersion.
    ImmersionSpec grid = load_grid_csv(1.0, 4, "cli_case5.csv");
    CHECK(grid.kind == "grid");

    CliResult verified = run({"verify", "cli_case5.json", "-o", "cli_case5_report.json"});
    CHECK(verified.code == 0);
    json report = json::parse(read_file("cli_case5_report.json"));
    CHECK(report["kind"] == "case5");
    CHECK(report["checks"]["pmc"]["pass"] == true);

    CliResult classified = run({"classify", "cli_case5.json"});
    CHECK(classified.code == 0);
    CHECK(split_lines(classified.out)[0] == "case5");

    CliResult conflicting = run({"build", "--kind", "slice", "--case", "3", "--c", "1",
                                 "-o", "cli_x.csv"});
    CHECK(conflicting.code == 2);

    CliResult stray = run({"build", "--kind", "slice", "--c", "1", "--H", "0.3",
                           "-o", "cli_x.csv"});
    CHECK(stray.code == 2);
    CHECK(stray.err.find("unknown") != std::string::npos);

    std::remove("cli_case5.csv");
    std::remove("cli_case5.json");
    std::remove("cli_case5_report.json");
}

TEST_CASE("frenet emits one curvature column per osculating order") {
    json gamma1 = {{"ambient", {{"c", 1.0}, {"n", 4}}},
                   {"curve",
                    {{"kind", "case5_gamma1"}, {"params", {{"H", 0.5}, {"T", 0.6}}}}},
                   {"samples", 9}};
    write_file("cli_gamma1.json", gamma1.dump(2));
    CliResult helix_curve = run({"frenet", "--curve", "cli_gamma1.json"});
    CHECK(helix_curve.code == 0);
    std::vector<std::string> lines = split_lines(helix_curve.out);
    REQUIRE(lines.size() == 10);
    CHECK(lines[0] == "s,kappa1,kappa2");
    double s = 0.0, k1 = 0.0, k2 = 0.0;
    REQUIRE(std::sscanf(lines[1].c_str(), "%lf,%lf,%lf", &s, &k1, &k2) == 3);
    CHECK(k1 == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(k2 == doctest::Approx(0.6).epsilon(1e-9));

    json gamma2 = gamma1;
    gamma2["curve"]["kind"] = "case5_gamma2";
    write_file("cli_gamma2.json", gamma2.dump(2));
    CliResult circle_curve = run({"frenet", "--curve", "cli_gamma2.json", "--samples", "5"});
    lines = split_lines(circle_curve.out);
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "s,kappa1");
    REQUIRE(std::sscanf(lines[1].c_str(), "%lf,%lf", &s, &k1) == 2);
    CHECK(k1 == doctest::Approx(1.2806248474865697).epsilon(1e-9));

    json vertical = {{"ambient", {{"c", -1.0}, {"n", 2}}},
                     {"curve", {{"kind", "vertical_line"}}},
                     {"samples", 4}};
    write_file("cli_vertical.json", vertical.dump(2));
    CliResult geodesic = run({"frenet", "--curve", "cli_vertical.json"});
    lines = split_lines(geodesic.out);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "s");

    std::remove("cli_gamma1.json");
    std::remove("cli_gamma2.json");
    std::remove("cli_vertical.json");
}

TEST_CASE("sweep emits one row per lattice point and check") {
    write_file("cli_sweep_base.json", torus_helix_doc(0.25).dump(2));
    CliResult swept = run({"sweep", "cli_sweep_base.json", "--param", "slope=0:0.5:3",
                           "-o", "cli_sweep.csv"});
    CHECK(swept.code == 1);

    std::vector<std::string> lines = split_lines(read_file("cli_sweep.csv"));
    REQUIRE(lines.size() == 1 + 3 * 12);
    CHECK(lines[0] == "slope,check,max,mean,tol,pass,applicable");
    CHECK(lines[1].rfind("0,helix,", 0) == 0);
    // The slope-0 block is an honest pmc surface; the slope-0.5 block is not.
    CHECK(lines[2].rfind("0,pmc,", 0) == 0);
    CHECK(lines[2].find(",1,1") != std::string::npos);
    bool found_failing_pmc = false;
    for (const std::string& line : lines) {
        if (line.rfind("0.5,pmc,", 0) == 0 && line.find(",0,1") != std::string::npos)
            found_failing_pmc = true;
    }
    CHECK(found_failing_pmc);

    CliResult two_axis = run({"sweep", "cli_sweep_base.json", "--param", "slope=0.2",
                              "--param", "r1=0.70710678118654752"});
    CHECK(two_axis.code == 1);
    lines = split_lines(two_axis.out);
    REQUIRE(lines.size() == 1 + 12);
    CHECK(lines[0] == "slope,r1,check,max,mean,tol,pass,applicable");

    CliResult bad_axis = run({"sweep", "cli_sweep_base.json", "--param", "slope=a:b:3"});
    CHECK(bad_axis.code == 2);
    CliResult bad_name = run({"sweep", "cli_sweep_base.json", "--param", "kind=1:2:2"});
    CHECK(bad_name.code == 2);

    std::remove("cli_sweep_base.json");
    std::remove("cli_sweep.csv");
}

TEST_CASE("the standalone binary matches the in-process driver byte for byte") {
    write_file("cli_bin_slice.json", slice_doc().dump(2));
    CliResult in_process = run({"verify", "cli_bin_slice.json"});
    REQUIRE(in_process.code == 0);

    const std::string binary = HELIXCTL_PATH;
    auto shell = [&](const std::string& cmdline) {
        const int status = std::system(cmdline.c_str());
        REQUIRE(status != -1);
        return WEXITSTATUS(status);
    };
    CHECK(shell(binary + " --help > cli_help.txt") == 0);
    CHECK(read_file("cli_help.txt").find("helixctl") != std::string::npos);

    CHECK(shell(binary + " verify cli_bin_slice.json -o cli_bin_report.json") == 0);
    CHECK(read_file("cli_bin_report.json") == in_process.out);

    CHECK(shell(binary + " verify cli_no_such_file.json 2> /dev/null") == 2);

    std::remove("cli_bin_slice.json");
    std::remove("cli_bin_report.json");
    std::remove("cli_help.txt");
}
