#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "collapse/config.hpp"
#include "collapse/diagnostics.hpp"
#include "collapse/io.hpp"

using namespace collapse;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path temp_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path p = fs::temp_directory_path() /
                       ("collapse_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter++));
    fs::create_directories(p);
    return p;
}

json minimal_config() {
    return json{{"version", 1},
                {"run_id", "t"},
                {"c", 1.75},
                {"scheme", "implicit"},
                {"dt", 1e-4},
                {"initial_condition", {{"type", "nonsymmetric"}}}};
}

}  // namespace

TEST_CASE("config parses and resolves defaults") {
    const RunConfig cfg = parse_config(minimal_config());
    CHECK(cfg.coefficient() == 1.75);
    CHECK(cfg.scheme.scheme == Scheme::Implicit);
    CHECK(cfg.scheme.effective_dt() == 1e-4);
    CHECK(cfg.scheme.subintervals == 202);
    CHECK(cfg.ic.type == "nonsymmetric");
}

TEST_CASE("scheme defaults for dt") {
    json j = minimal_config();
    j.erase("dt");
    CHECK(parse_config(j).scheme.effective_dt() == 1e-4);  // implicit default
    j["scheme"] = "explicit";
    CHECK(parse_config(j).scheme.effective_dt() == 1e-5);
}

TEST_CASE("config rejects unknown keys and bad values") {
    json j = minimal_config();
    j["tyop"] = 1;
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = minimal_config();
    j["stop"] = {{"max_tim", 1.0}};
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = minimal_config();
    j["dt"] = -1e-5;
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = minimal_config();
    j["version"] = 2;
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    j = minimal_config();
    j.erase("version");
    CHECK_THROWS_AS(parse_config(j), ConfigError);
}

TEST_CASE("c and rock_fluid are mutually exclusive and one is required") {
    json j = minimal_config();
    j["rock_fluid"] = {{"permeability", 1e-12}, {"block_porosity", 0.35},
                       {"fissure_porosity", 0.1}, {"absorption_fraction", 0.5},
                       {"density", 1000.0},      {"viscosity", 1e-3}};
    CHECK_THROWS_WITH(parse_config(j), Catch::Matchers::ContainsSubstring("both"));
    j.erase("c");
    const RunConfig cfg = parse_config(j);
    CHECK(cfg.coefficient() == Catch::Approx(1.75));
    j.erase("rock_fluid");
    CHECK_THROWS_AS(parse_config(j), ConfigError);
}

TEST_CASE("manifest wraps the resolved config and parses back identically") {
    const RunConfig cfg = parse_config(minimal_config());
    const json manifest = make_manifest(cfg);
    CHECK(manifest.at("artifact").at("name") == kArtifactName);
    const RunConfig again = parse_config(manifest);
    CHECK(config_to_json(again) == config_to_json(cfg));
}

TEST_CASE("series CSV round-trips bit-exactly") {
    TimeSeries s;
    s.meta.run_id = "rt";
    s.records = {{0.0, -1.0, 1.0, 1.0},
                 {0.1, -0.987654321987654321, 0.91234567891234567, 0.5000000000000001},
                 {0.2, -0.5, 0.5, 1e-300}};
    const fs::path dir = temp_dir("csv");
    io::write_series_csv(dir / "s.csv", s);
    const TimeSeries back = io::read_series_csv(dir / "s.csv");
    REQUIRE(back.records.size() == s.records.size());
    for (std::size_t i = 0; i < s.records.size(); ++i) {
        CHECK(back.records[i].t == s.records[i].t);
        CHECK(back.records[i].x_left == s.records[i].x_left);
        CHECK(back.records[i].x_right == s.records[i].x_right);
        CHECK(back.records[i].h_max == s.records[i].h_max);
    }
    fs::remove_all(dir);
}

TEST_CASE("series reader validates header and monotone time") {
    const fs::path dir = temp_dir("badcsv");
    io::write_text_file(dir / "bad1.csv", "time,xl,xr,h\n0,0,1,1\n");
    CHECK_THROWS_AS(io::read_series_csv(dir / "bad1.csv"), std::runtime_error);
    io::write_text_file(dir / "bad2.csv", "t,x_L,x_R,h_max\n0.2,-1,1,1\n0.1,-1,1,1\n");
    CHECK_THROWS_AS(io::read_series_csv(dir / "bad2.csv"), std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("identical configs reproduce byte-identical series files") {
    json j = minimal_config();
    j["stop"] = {{"max_time", 0.02}};
    j["snapshot_every"] = 100;
    const RunConfig cfg = parse_config(j);

    const fs::path d1 = temp_dir("det1");
    const fs::path d2 = temp_dir("det2");
    for (const fs::path& d : {d1, d2}) {
        const TimeSeries ts = run(build_ic(cfg), cfg.coefficient(), cfg.scheme, cfg.run_id);
        io::write_run_outputs(d, ts);
    }
    std::ifstream f1(d1 / "t_series.csv", std::ios::binary);
    std::ifstream f2(d2 / "t_series.csv", std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(b1.size() > 1000);
    CHECK(b1 == b2);
    fs::remove_all(d1);
    fs::remove_all(d2);
}
