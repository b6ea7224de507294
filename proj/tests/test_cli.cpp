#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef VFGL_CLI_PATH
#error "VFGL_CLI_PATH must be defined"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args, const std::string& log) {
    const std::string cmd = std::string(VFGL_CLI_PATH) + " " + args + " > " + log + ".out 2> " +
                            log + ".err";
    return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("find-tau0 emits a sane constants bundle") {
    fs::remove_all("cli_t1");
    REQUIRE(run("--grid-n 8001 --out cli_t1 spectrum --find-tau0", "cli_t1_log") == 0);
    auto j = json::parse(slurp("cli_t1/constants.json"));
    CHECK(std::abs(j["lambda0"].get<double>() - 0.57) <= 0.01);
    CHECK(j["tau0"].get<double>() < 0.0);
    CHECK(j["grid"]["n"].get<int>() == 8001);
    CHECK(fs::exists("cli_t1/config_resolved.txt"));
}

TEST_CASE("identical configs produce byte-identical artifacts") {
    fs::remove_all("cli_d1");
    fs::remove_all("cli_d2");
    const std::string args = "--grid-n 6001 spectrum --find-tau0 --steps 11 --scan-min -1 "
                             "--scan-max 0 --second";
    REQUIRE(run("--out cli_d1 " + args, "cli_d1_log") == 0);
    REQUIRE(run("--out cli_d2 " + args, "cli_d2_log") == 0);
    for (const char* name : {"constants.json", "spectral_curve.csv", "spectral_curve.json"}) {
        CHECK(slurp(fs::path("cli_d1") / name) == slurp(fs::path("cli_d2") / name));
        CHECK(!slurp(fs::path("cli_d1") / name).empty());
    }
}

TEST_CASE("spectral curve artifacts carry the declared header") {
    auto csv = slurp("cli_d1/spectral_curve.csv");
    CHECK(csv.rfind("alpha,lambda1,lambda2\n", 0) == 0);
    auto records = json::parse(slurp("cli_d1/spectral_curve.json"));
    REQUIRE(records.is_array());
    CHECK(records.size() == 11);
    CHECK(records[0].contains("grid"));
}

TEST_CASE("environment variables override defaults") {
    fs::remove_all("cli_env");
    const std::string cmd = std::string("VFGL_GRID_N=6001 ") + VFGL_CLI_PATH +
                            " --out cli_env spectrum --find-tau0 > cli_env.out 2> cli_env.err";
    REQUIRE(std::system(cmd.c_str()) == 0);
    auto j = json::parse(slurp("cli_env/constants.json"));
    CHECK(j["grid"]["n"].get<int>() == 6001);
}

TEST_CASE("gl1d emits the record and the profile table") {
    fs::remove_all("cli_gl");
    REQUIRE(run("--grid-n 8001 --out cli_gl gl1d --alpha -0.3468 --b 0.58", "cli_gl_log") == 0);
    auto j = json::parse(slurp("cli_gl/ground_energy.json"));
    CHECK(j["energy"].get<double>() < 0.0);
    CHECK(std::abs(j["energy"].get<double>() + 0.5 * 0.58 * j["f4norm"].get<double>()) <=
          1e-9 * std::abs(j["energy"].get<double>()));
    auto csv = slurp("cli_gl/profile.csv");
    CHECK(csv.rfind("t,f\n", 0) == 0);
}

TEST_CASE("energy subcommand emits the domain report") {
    fs::remove_all("cli_en");
    REQUIRE(run("--grid-n 8001 --out cli_en energy --field linear --kappa 40 --rho 1e-3",
                "cli_en_log") == 0);
    auto j = json::parse(slurp("cli_en/energy_report.json"));
    CHECK(j["classification"].get<std::string>() == "whole-curve");
    CHECK(j["c0"].get<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
    CHECK(j["near_critical"].get<double>() < 0.0);
    CHECK(j["surrogate_E"].get<bool>());
}

TEST_CASE("cover subcommand reports the covering defects") {
    fs::remove_all("cli_cv");
    REQUIRE(run("--out cli_cv cover --field parabola --ell 0.02", "cli_cv_log") == 0);
    auto j = json::parse(slurp("cli_cv/covering.json"));
    CHECK(j["N"].get<int>() > 10);
    CHECK(j["max_spacing_defect"].get<double>() <= 4.0 * 0.02 * 0.02);
}

TEST_CASE("invalid usage exits nonzero with a machine-readable error") {
    CHECK(run("gl1d --b not-a-number", "cli_bad1") != 0);
    fs::remove_all("cli_bad2_out");
    CHECK(run("--out cli_bad2_out energy --field nosuchfield", "cli_bad2") != 0);
    auto err = slurp("cli_bad2.err");
    CHECK(!err.empty());
    auto j = json::parse(err);
    CHECK(j.contains("error"));
}
