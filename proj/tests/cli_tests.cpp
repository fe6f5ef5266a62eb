#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "arratia/config.hpp"
#include "arratia/run.hpp"

using namespace arratia;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("arratia_test_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("round trip with comments and dotted keys") {
        const RunConfig cfg = parse_config_text(
            "# a comment\n"
            "mode = coalescing\n"
            "grid.m_space = 5\n"
            "grid.k_time = 16   # trailing comment\n"
            "grid.horizon_t = 0.2\n"
            "seed = 42\n",
            "inline");
        CHECK(cfg.mode == RunMode::Coalescing);
        CHECK(cfg.grid.m_space == 5);
        CHECK(cfg.grid.k_time == 16);
        CHECK(cfg.seed == 42);
    }
    SUBCASE("errors carry file and line") {
        try {
            parse_config_text("mode = coalescing\nnonsense_key = 3\n", "conf");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("conf:2") != std::string::npos);
            CHECK(std::string(e.what()).find("nonsense_key") != std::string::npos);
        }
        CHECK_THROWS_AS(parse_config_text("mode = warp\n", "c"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("grid.m_space = five\n", "c"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("seed = 1\nseed = 2\n", "c"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("just a line\n", "c"), ConfigError);
    }
    SUBCASE("mode-specific requirements") {
        CHECK_THROWS_AS(parse_config_text("mode = smooth\n", "c"), ConfigError);
        CHECK_NOTHROW(
            parse_config_text("mode = smooth\nsigma = 0.1\nepsilon = 0.01\n", "c"));
        CHECK_THROWS_AS(
            parse_config_text("mode = coalescing\ninitial.kind = list\n"
                              "grid.m_space = 3\ninitial.values = 0.3 0.1 0.5\n",
                              "c"),
            ConfigError);  // non-monotone list
    }
    SUBCASE("manifest text reparses to the same hash") {
        const RunConfig cfg = parse_config_text(
            "mode = smooth\nsigma = 0.15\nepsilon = 0.02\ngrid.m_space = 8\n"
            "grid.k_time = 32\ngrid.horizon_t = 0.1\nseed = 9\n",
            "inline");
        const RunConfig back = parse_config_text(manifest_text(cfg), "manifest");
        CHECK(config_hash(back) == config_hash(cfg));
        CHECK(manifest_text(back) == manifest_text(cfg));
    }
}

TEST_CASE("runs are deterministic and content-addressed") {
    TempDir tmp("determinism");
    RunConfig cfg = parse_config_text(
        "mode = coalescing\ngrid.m_space = 5\ngrid.k_time = 64\ngrid.horizon_t = 0.2\n"
        "seed = 42\nreplicas = 10\n",
        "inline");
    cfg.output_dir = (tmp.path / "a").string();
    const RunResult first = run(cfg);
    CHECK(first.exit_code == 0);

    cfg.output_dir = (tmp.path / "b").string();
    const RunResult second = run(cfg);
    CHECK(second.exit_code == 0);

    // Byte-identical artifacts under identical manifests.
    for (const auto& entry : fs::directory_iterator(first.run_dir)) {
        const fs::path other = fs::path(second.run_dir) / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(entry.path()) == slurp(other));
    }

    // The directory name carries the config hash; a different seed moves it.
    CHECK(first.run_dir.find(config_hash(cfg)) != std::string::npos);
    cfg.seed = 43;
    cfg.output_dir = (tmp.path / "b").string();
    const RunResult third = run(cfg);
    CHECK(third.run_dir != second.run_dir);
}

TEST_CASE("rerunning from the emitted manifest reproduces the run") {
    TempDir tmp("manifest");
    RunConfig cfg = parse_config_text(
        "mode = smooth\nsigma = 0.2\nepsilon = 0.01\ngrid.m_space = 8\n"
        "grid.k_time = 32\ngrid.horizon_t = 0.1\nseed = 7\n",
        "inline");
    cfg.output_dir = (tmp.path / "a").string();
    const RunResult first = run(cfg);
    CHECK(first.exit_code == 0);

    RunConfig from_manifest =
        parse_config_text(slurp(fs::path(first.run_dir) / "manifest.txt"), "manifest");
    from_manifest.output_dir = (tmp.path / "b").string();
    const RunResult second = run(from_manifest);
    CHECK(slurp(fs::path(first.run_dir) / "flow.csv") ==
          slurp(fs::path(second.run_dir) / "flow.csv"));
}

TEST_CASE("config errors exit with code 2 and a precise message") {
    TempDir tmp("badconfig");
    const fs::path conf = tmp.path / "bad.conf";
    std::ofstream(conf) << "mode = coalescing\ngrid.m_space = -4\n";
    const RunResult result = run_from_file(conf.string());
    CHECK(result.exit_code == 2);
    REQUIRE(!result.messages.empty());
    CHECK(result.messages[0].find(conf.string()) != std::string::npos);
}

TEST_CASE("compare mode lays out the figure artifacts") {
    TempDir tmp("compare");
    RunConfig cfg = parse_config_text(
        "mode = compare\ngrid.m_space = 5\ngrid.k_time = 32\ngrid.horizon_t = 0.1\n"
        "seed = 3\nreplicas = 6\ncompare.sigmas = 0.2 0.1\ncompare.epsilons = 0.02 0.02\n",
        "inline");
    cfg.output_dir = tmp.path.string();
    const RunResult result = run(cfg);
    CHECK(result.exit_code == 0);
    CHECK(fs::exists(fs::path(result.run_dir) / "coalescing.csv"));
    CHECK(fs::exists(fs::path(result.run_dir) / "smooth_sigma0.2_eps0.02.csv"));
    CHECK(fs::exists(fs::path(result.run_dir) / "smooth_sigma0.1_eps0.02.csv"));
    CHECK(fs::exists(fs::path(result.run_dir) / "report_compare.json"));

    // Both trajectory files share the header contract.
    const std::string csv = slurp(fs::path(result.run_dir) / "coalescing.csv");
    CHECK(csv.rfind("t,u,value,mass\n", 0) == 0);
}

TEST_CASE("verify mode reports are byte-identical across invocations") {
    TempDir tmp("verify");
    RunConfig cfg = parse_config_text(
        "mode = verify\ngrid.m_space = 4\ngrid.k_time = 32\ngrid.horizon_t = 0.1\n"
        "seed = 42\nreplicas = 150\n",
        "inline");
    cfg.output_dir = (tmp.path / "a").string();
    const RunResult first = run(cfg);
    cfg.output_dir = (tmp.path / "b").string();
    const RunResult second = run(cfg);
    CHECK(first.exit_code == 0);
    CHECK(slurp(fs::path(first.run_dir) / "report_verify.json") ==
          slurp(fs::path(second.run_dir) / "report_verify.json"));
}
