#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "bicwave/config.hpp"
#include "bicwave/io.hpp"

using namespace bicwave;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST_CASE("fnv1a fingerprints") {
    CHECK(fnv1a("") == 14695981039346656037ull);
    CHECK(fnv1a("a") != fnv1a("b"));
    CHECK(fnv1a("bicwave") == fnv1a("bicwave"));
    CHECK(hex64(0xdeadbeefull) == "00000000deadbeef");
}

TEST_CASE("round-trip double formatting") {
    for (double v : {0.1, 1.0 / 3.0, 2.5e-300, -7.25, 3.141592653589793}) {
        CHECK(std::stod(fmt(v)) == v);
    }
    CHECK(fmt(1.0) == "1");
}

TEST_CASE("csv writer stamps provenance and header") {
    const fs::path p = fs::temp_directory_path() / "bicwave_test_io.csv";
    {
        CsvWriter csv(p, {"x", "y"}, "cafebabe");
        csv.row({"1", "2"});
        csv.row({fmt(0.5), fmt(-0.25)});
    }
    const std::string text = slurp(p);
    CHECK(text == "# bicwave 0.1.0 cafebabe\nx,y\n1,2\n0.5,-0.25\n");
    fs::remove(p);
}

TEST_CASE("config canonicalization and fingerprint stability") {
    RunConfig a, b;
    CHECK(a.fingerprint() == b.fingerprint());
    b.n = 31;
    CHECK(a.fingerprint() != b.fingerprint());
    b = a;
    b.quad.rel_tol = 1e-9;
    CHECK(a.fingerprint() != b.fingerprint());
}

TEST_CASE("config file loading") {
    const fs::path p = fs::temp_directory_path() / "bicwave_cfg.json";
    {
        std::ofstream out(p);
        out << R"({"n": 12, "gamma": 0.05, "model_free": true, "b1": 0.002})";
    }
    RunConfig cfg;
    load_config_file(cfg, p.string());
    CHECK(cfg.n == 12);
    CHECK(cfg.gamma == 0.05);
    CHECK(cfg.model_free);
    CHECK(cfg.b1_override == 0.002);
    CHECK(cfg.m == 1.0); // untouched default

    {
        std::ofstream out(p);
        out << R"({"unknown_key": 1})";
    }
    CHECK_THROWS_AS(load_config_file(cfg, p.string()), ConfigError);
    {
        std::ofstream out(p);
        out << "{not json";
    }
    CHECK_THROWS_AS(load_config_file(cfg, p.string()), ConfigError);
    CHECK_THROWS_AS(load_config_file(cfg, "/nonexistent/path.json"), ConfigError);
    fs::remove(p);
}

TEST_CASE("config validation") {
    RunConfig cfg;
    cfg.n = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.gamma = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.m = 0.1;
    cfg.d = 5.0;
    CHECK(!cfg.below_evanescent_regime());
    cfg.d = 5.0;
    cfg.m = 0.1;
    cfg.d = 9.0;
    CHECK(!cfg.below_evanescent_regime());
    cfg.d = 2.0;
    CHECK(cfg.below_evanescent_regime());
}

TEST_CASE("svg plot emits well-formed markup") {
    const fs::path p = fs::temp_directory_path() / "bicwave_test_plot.svg";
    SvgPlot plot(0.0, 10.0, -1.0, 1.0);
    plot.polyline({0.0, 5.0, 10.0}, {0.0, 1.0, -1.0});
    plot.stems({2.0, 8.0}, {0.5, -0.5});
    plot.title("test");
    plot.write(p);
    const std::string text = slurp(p);
    CHECK(text.find("<svg") == 0);
    CHECK(text.find("<polyline") != std::string::npos);
    CHECK(text.find("<circle") != std::string::npos);
    CHECK(text.rfind("</svg>\n") == text.size() - 7);
    fs::remove(p);
}
