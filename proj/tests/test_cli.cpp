// End-to-end checks of the collapse_sim binary: exit codes, file outputs,
// manifest-driven reproducibility.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "collapse/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(COLLAPSE_SIM_BIN) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

fs::path temp_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path p = fs::temp_directory_path() /
                       ("collapse_cli_" + tag + "_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter++));
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("simulate runs a small config and writes series, snapshots, manifest") {
    const fs::path dir = temp_dir("sim");
    const json cfg = {{"version", 1},
                      {"run_id", "mini"},
                      {"c", 1.75},
                      {"scheme", "implicit"},
                      {"dt", 1e-4},
                      {"snapshot_every", 50},
                      {"stop", {{"max_time", 0.01}}},
                      {"initial_condition",
                       {{"type", "self_similar"}, {"B", 1.0}, {"t0", 1.0}, {"t_start", 0.0}, {"x0", 0.0}}},
                      {"output_dir", (dir / "out").string()}};
    spit(dir / "cfg.json", cfg.dump());
    REQUIRE(run_cli("simulate --config " + (dir / "cfg.json").string()) == 0);
    CHECK(fs::exists(dir / "out" / "mini_series.csv"));
    CHECK(fs::exists(dir / "out" / "mini_snap_0.csv"));
    CHECK(fs::exists(dir / "out" / "mini_snap_50.csv"));
    CHECK(fs::exists(dir / "out" / "manifest.json"));

    // rerunning from the manifest reproduces the series byte for byte
    const std::string first = slurp(dir / "out" / "mini_series.csv");
    json manifest = json::parse(slurp(dir / "out" / "manifest.json"));
    manifest["config"]["output_dir"] = (dir / "out2").string();
    spit(dir / "manifest2.json", manifest.dump());
    REQUIRE(run_cli("simulate --config " + (dir / "manifest2.json").string()) == 0);
    CHECK(slurp(dir / "out2" / "mini_series.csv") == first);
    fs::remove_all(dir);
}

TEST_CASE("simulate exit codes: config errors are 1, numerical aborts are 2") {
    const fs::path dir = temp_dir("simerr");
    json cfg = {{"version", 1},
                {"c", 1.75},
                {"rock_fluid", {{"permeability", 1e-12}}},
                {"initial_condition", {{"type", "nonsymmetric"}}},
                {"output_dir", (dir / "o").string()}};
    spit(dir / "both.json", cfg.dump());
    CHECK(run_cli("simulate --config " + (dir / "both.json").string()) == 1);

    cfg = {{"version", 1},
           {"c", 1.75},
           {"dt", -1e-5},
           {"initial_condition", {{"type", "nonsymmetric"}}},
           {"output_dir", (dir / "o").string()}};
    spit(dir / "baddt.json", cfg.dump());
    CHECK(run_cli("simulate --config " + (dir / "baddt.json").string()) == 1);

    CHECK(run_cli("simulate --config " + (dir / "missing.json").string()) == 1);

    // explicit scheme driven far past its stability limit
    cfg = {{"version", 1},
           {"run_id", "blow"},
           {"c", 1.75},
           {"scheme", "explicit"},
           {"dt", 1e-2},
           {"initial_condition",
            {{"type", "self_similar"}, {"B", 1.0}, {"t0", 1.0}, {"t_start", 0.0}, {"x0", 0.0}}},
           {"output_dir", (dir / "blow").string()}};
    spit(dir / "blow.json", cfg.dump());
    CHECK(run_cli("simulate --config " + (dir / "blow.json").string()) == 2);
    fs::remove_all(dir);
}

TEST_CASE("selfsimilar emits profiles and fit-ready series; fit recovers the parameters") {
    const fs::path dir = temp_dir("ss");
    const fs::path series = dir / "exact_series.csv";
    REQUIRE(run_cli("selfsimilar --c 1.75 --B 1 --t0 1 --series --t-start 0 --t-end 0.99 "
                    "--samples 500 --output " +
                    series.string()) == 0);
    REQUIRE(fs::exists(series));

    const std::string cmd = std::string(COLLAPSE_SIM_BIN) + " fit --series " + series.string() +
                            " --c 1.75 --out-dir " + dir.string() + " > " +
                            (dir / "report.json").string() + " 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(dir / "exact_series_line_t0.csv"));
    CHECK(fs::exists(dir / "exact_series_loglog.csv"));

    // exact synthetic input: the report recovers the parameters at regression
    // precision
    const json report = json::parse(slurp(dir / "report.json"));
    CHECK(report.at("t0").get<double>() == Catch::Approx(1.0).margin(1e-7));
    CHECK(report.at("B").get<double>() == Catch::Approx(1.0).margin(1e-7));
    CHECK(report.at("mu").get<double>() == Catch::Approx(1.5).margin(1e-7));
    CHECK(report.at("r2_linear").get<double>() > 0.999999);
    CHECK(report.at("r2_loglog").get<double>() > 0.999999);
    CHECK(report.at("window_end").get<double>() > report.at("window_start").get<double>());

    // profile emission at t = 0: parabola of height 1 and half-width 1
    const fs::path prof = dir / "profile.csv";
    REQUIRE(run_cli("selfsimilar --c 1.75 --B 1 --t0 1 --t 0 --samples 101 --output " +
                    prof.string()) == 0);
    const std::string text = slurp(prof);
    CHECK(text.rfind("x,h", 0) == 0);

    // evaluation past the collapse time is a domain error
    CHECK(run_cli("selfsimilar --c 1.75 --B 1 --t0 1 --t 1.5 --output " +
                  (dir / "nope.csv").string()) == 1);
    // the exponential boundary solution needs both constants
    CHECK(run_cli("selfsimilar --c 1.5 --theta 1 --output " + (dir / "nope2.csv").string()) == 1);
    CHECK(run_cli("selfsimilar --c 1.5 --theta 1 --C 1 --t 0.5 --output " +
                  (dir / "exp.csv").string()) == 0);
    fs::remove_all(dir);
}

TEST_CASE("fit of a truncated series exits 2") {
    const fs::path dir = temp_dir("fiterr");
    const fs::path series = dir / "short_series.csv";
    REQUIRE(run_cli("selfsimilar --c 1.75 --B 1 --t0 1 --series --t-start 0 --t-end 0.05 "
                    "--samples 200 --output " +
                    series.string()) == 0);
    CHECK(run_cli("fit --series " + series.string() + " --c 1.75") == 2);
    fs::remove_all(dir);
}

TEST_CASE("shoot prints the exponent and honors exit codes") {
    const fs::path dir = temp_dir("shoot");
    CHECK(run_cli("shoot --c 1.4") == 1);   // domain error below 3/2
    CHECK(run_cli("shoot --c 2.0 --profile " + (dir / "prof.csv").string()) == 0);
    CHECK(fs::exists(dir / "prof.csv"));
    fs::remove_all(dir);
}

TEST_CASE("reduce reports the canonical coefficient") {
    const fs::path dir = temp_dir("reduce");
    const json params = {{"permeability", 1e-12}, {"block_porosity", 0.35},
                         {"fissure_porosity", 0.1}, {"absorption_fraction", 0.5},
                         {"density", 1000.0},      {"viscosity", 1e-3}};
    spit(dir / "params.json", params.dump());
    const std::string cmd = std::string(COLLAPSE_SIM_BIN) + " reduce --params " +
                            (dir / "params.json").string() + " > " + (dir / "out.json").string();
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    const json out = json::parse(slurp(dir / "out.json"));
    CHECK(out.at("c").get<double>() == Catch::Approx(1.75));
    CHECK(out.at("regime").get<std::string>() == "finite_time_collapse");

    const json bad = {{"permeability", 1e-12}};
    spit(dir / "bad.json", bad.dump());
    CHECK(run_cli("reduce --params " + (dir / "bad.json").string()) == 1);
    fs::remove_all(dir);
}

TEST_CASE("sweep runs one job per coefficient") {
    const fs::path dir = temp_dir("sweep");
    const json cfg = {{"version", 1},
                      {"run_id", "sw"},
                      {"c", 1.75},
                      {"scheme", "implicit"},
                      {"dt", 1e-4},
                      {"snapshot_every", 1000},
                      {"stop", {{"max_time", 0.005}}},
                      {"initial_condition",
                       {{"type", "smoothed_block"}, {"height", 1.0}, {"x_left", -1.0},
                        {"x_right", 1.0}, {"smoothing_width", 0.25}}},
                      {"output_dir", (dir / "out").string()}};
    spit(dir / "cfg.json", cfg.dump());
    REQUIRE(run_cli("simulate --config " + (dir / "cfg.json").string() + " --sweep 1.6,1.75,2.0") == 0);
    CHECK(fs::exists(dir / "out" / "sw_c1.6_series.csv"));
    CHECK(fs::exists(dir / "out" / "sw_c1.75_series.csv"));
    CHECK(fs::exists(dir / "out" / "sw_c2.0_series.csv"));
    fs::remove_all(dir);
}

TEST_CASE("COLLAPSE_SIM_OUT overrides the output directory") {
    const fs::path dir = temp_dir("envout");
    const json cfg = {{"version", 1},
                      {"run_id", "envy"},
                      {"c", 1.75},
                      {"scheme", "implicit"},
                      {"dt", 1e-4},
                      {"stop", {{"max_time", 0.002}}},
                      {"initial_condition", {{"type", "nonsymmetric"}}},
                      {"output_dir", (dir / "ignored").string()}};
    spit(dir / "cfg.json", cfg.dump());
    const std::string cmd = "COLLAPSE_SIM_OUT=" + (dir / "forced").string() + " " +
                            std::string(COLLAPSE_SIM_BIN) + " simulate --config " +
                            (dir / "cfg.json").string() + " >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(dir / "forced" / "envy_series.csv"));
    CHECK(!fs::exists(dir / "ignored"));
    fs::remove_all(dir);
}

TEST_CASE("repository presets parse and drive short runs") {
    for (const char* name : {"figure1.json", "figure3.json", "figure4.json"}) {
        const fs::path preset = fs::path(COLLAPSE_PRESET_DIR) / name;
        REQUIRE(fs::exists(preset));
        // truncate heavily so this stays a smoke test
        json j = json::parse(slurp(preset));
        const fs::path dir = temp_dir(std::string("preset_") + name);
        j["stop"]["max_time"] = 0.002;
        j["output_dir"] = (dir / "out").string();
        spit(dir / "p.json", j.dump());
        CHECK(run_cli("simulate --config " + (dir / "p.json").string()) == 0);
        fs::remove_all(dir);
    }
}

TEST_CASE("figure1 preset end to end: simulate then fit lands near the analytic exponent") {
    const fs::path dir = temp_dir("fig1_e2e");
    json j = json::parse(slurp(fs::path(COLLAPSE_PRESET_DIR) / "figure1.json"));
    j["output_dir"] = (dir / "out").string();
    spit(dir / "p.json", j.dump());
    REQUIRE(run_cli("simulate --config " + (dir / "p.json").string()) == 0);

    const std::string cmd = std::string(COLLAPSE_SIM_BIN) + " fit --series " +
                            (dir / "out" / "figure1_series.csv").string() + " --c 1.75 > " +
                            (dir / "report.json").string() + " 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    const json report = json::parse(slurp(dir / "report.json"));
    CHECK(report.at("mu").get<double>() == Catch::Approx(1.5).margin(0.03));  // within 2%
    fs::remove_all(dir);
}
