#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "homogh/error.hpp"
#include "homogh/experiment.hpp"

using namespace homogh;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("homogh_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int lines(const fs::path& p) {
    std::ifstream in(p);
    int n = 0;
    for (std::string l; std::getline(in, l);) ++n;
    return n;
}

}  // namespace

TEST_CASE("config round trip") {
    ExperimentConfig cfg;
    cfg.grid.depth = 3;
    cfg.data.mu.kind = "perturb";
    cfg.data.mu.parameter = 0.05;
    cfg.fingerprint.mus = {{"scale", 2.0, {}}, {"polynomial", 1.0, {{1, 0}, {0.1, 0}}}};
    cfg.data.zeros = {{{0.5, 0.1}, 2}};
    auto j = to_json(cfg);
    auto back = config_from_json(j);
    CHECK(back == cfg);
    CHECK(to_json(back).dump() == j.dump());
    CHECK(config_from_json(nlohmann::json::object()) == ExperimentConfig{});
}

TEST_CASE("config validation") {
    auto j = to_json(ExperimentConfig{});
    j["grid"]["bogus"] = 1;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    auto k = to_json(ExperimentConfig{});
    k["budgets"]["curl"] = -1.0;
    CHECK_THROWS_AS(config_from_json(k), ConfigError);
    auto m = to_json(ExperimentConfig{});
    m["data"]["kind"] = "torus";
    CHECK_THROWS_AS(config_from_json(m), ConfigError);

    ExperimentConfig bad;
    bad.grid.depth = 40;
    bad.output = scratch("bad").string();
    std::ostringstream diag;
    CHECK(run_command("tessellate", bad, diag) == 2);
    CHECK(diag.str().find("error=config") != std::string::npos);
    CHECK(run_command("nonsense", ExperimentConfig{}, diag) == 2);
}

TEST_CASE("tessellate writes ten triangles at depth two") {
    ExperimentConfig cfg;
    cfg.grid.depth = 2;
    cfg.output = scratch("tess").string();
    std::ostringstream diag;
    REQUIRE(run_command("tessellate", cfg, diag) == 0);
    CHECK(lines(fs::path(cfg.output) / "tessellation_triangles.csv") == 11);
    CHECK(fs::exists(fs::path(cfg.output) / "tessellation.svg"));
    auto manifest = nlohmann::json::parse(slurp(fs::path(cfg.output) / "manifest.json"));
    CHECK(manifest["commands"]["tessellate"]["exit"] == 0);
    for (auto& [name, entry] : manifest["files"].items())
        CHECK(entry["sha256"] == file_sha256(fs::path(cfg.output) / name));
}

TEST_CASE("reruns are byte identical") {
    ExperimentConfig cfg;
    cfg.grid.resolution = 9;
    cfg.fingerprint.samples = 30;
    std::ostringstream diag;
    std::vector<std::string> commands{"tessellate", "hororegions", "build", "fingerprint"};
    auto a = scratch("rerun_a"), b = scratch("rerun_b");
    for (const auto& out : {a, b}) {
        cfg.output = out.string();
        for (const auto& c : commands) REQUIRE(run_command(c, cfg, diag) == 0);
    }
    int compared = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        if (e.path().extension() != ".csv" && e.path().extension() != ".svg") continue;
        CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
        ++compared;
    }
    CHECK(compared >= 7);
}

TEST_CASE("verify exit codes") {
    ExperimentConfig flat;
    flat.data.kind = "flat";
    flat.grid.points = 20;
    flat.output = scratch("flat").string();
    std::ostringstream ok;
    CHECK(run_command("verify", flat, ok) == 0);

    ExperimentConfig bad;
    bad.data.v_multiplier = 1.01;
    bad.grid.points = 10;
    bad.grid.beta_grid = 10;
    bad.grid.contact_samples = 50;
    bad.output = scratch("corrupt").string();
    std::ostringstream diag;
    CHECK(run_command("verify", bad, diag) == 1);
    CHECK(diag.str().find("check=curl status=FAIL") != std::string::npos);
}
