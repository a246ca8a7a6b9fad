#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "icrt/cli.hpp"
#include "icrt/error.hpp"
#include "icrt/io.hpp"

using namespace icrt;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path tmp(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("icrt_lab_test_" + name);
}

}  // namespace

TEST_CASE("sample command") {
    const Run r = run({"sample", "--theta0", "1", "--level", "4", "--seed", "7"});
    REQUIRE(r.code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["tool"] == "icrt_lab");
    CHECK(j["config"]["seed"] == 7);
    CHECK(run({"sample", "--theta0", "1", "--level", "4", "--seed", "7"}).out == r.out);
    CHECK(run({"sample", "--theta0", "1", "--level", "4", "--seed", "8"}).out != r.out);
}

TEST_CASE("usage and input errors exit with 1") {
    const Run bad = run({"sample", "--theta0", "2"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("must equal 1") != std::string::npos);
    CHECK(run({"sample", "--level", "3", "--branches", "4"}).code == 1);
    CHECK(run({"verify", "nonsense"}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"process", "--grid", "10"}).code == 1);
    CHECK(run({"sample", "--thetas", tmp("missing.json").string()}).code == 1);
}

TEST_CASE("weights file") {
    const auto p = tmp("weights.txt");
    io::write_file(p.string(), "0.6, 0.3\n");
    const Run r = run({"sample", "--thetas", p.string(), "--branches", "5"});
    REQUIRE(r.code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["config"]["thetas"] == p.string());
    io::write_file(p.string(), "[0.3, 0.6]");
    CHECK(run({"sample", "--thetas", p.string()}).code == 1);
    std::filesystem::remove(p);
}

TEST_CASE("process command writes a header and a row per grid point") {
    const auto svg = tmp("process.svg");
    const Run r = run({"process", "--theta0", "1", "--level", "4", "--grid", "1024", "--svg", svg.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("# {", 0) == 0);
    std::istringstream in(r.out);
    std::string line;
    std::size_t rows = 0;
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line == "t,height,lukasiewicz,snake");
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 1024);
    CHECK(io::read_file(svg.string()).find("<svg") != std::string::npos);
    std::filesystem::remove(svg);

    // A saved sample gives the same processes.
    const auto js = tmp("sample.json");
    REQUIRE(run({"sample", "--theta0", "1", "--level", "4", "--out", js.string()}).code == 0);
    const Run again = run({"process", "--sample", js.string(), "--theta0", "1", "--level", "4", "--grid", "1024"});
    REQUIRE(again.code == 0);
    CHECK(again.out.substr(again.out.find('\n')) == r.out.substr(r.out.find('\n')));
    std::filesystem::remove(js);
}

TEST_CASE("dims command") {
    const Run r = run({"dims", "--theta0", "1"});
    REQUIRE(r.code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["theoretical"]["lower"].get<double>() == doctest::Approx(2.0));
    const Run p = run({"dims", "--alpha", "1.5"});
    REQUIRE(p.code == 0);
    const nlohmann::json q = nlohmann::json::parse(p.out);
    CHECK(q["power_law_family"]["lower"].get<double>() == doctest::Approx(1.5).epsilon(0.05));
}

TEST_CASE("verify is reproducible and reports failure codes") {
    const Run a = run({"verify", "metric", "--seed", "3"});
    const Run b = run({"verify", "metric", "--seed", "3"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    const nlohmann::json j = nlohmann::json::parse(a.out);
    CHECK(j["suite"] == "metric");
    CHECK(j["passed"] == true);
}

TEST_CASE("seed from the environment") {
    ::setenv("ICRT_LAB_SEED", "99", 1);
    CHECK(default_seed() == 99);
    const Run r = run({"sample", "--branches", "3", "--theta0", "1"});
    CHECK(nlohmann::json::parse(r.out)["config"]["seed"] == 99);
    ::setenv("ICRT_LAB_SEED", "x1", 1);
    CHECK_THROWS_AS(default_seed(), InvalidInput);
    ::unsetenv("ICRT_LAB_SEED");
    CHECK(default_seed() == 1);
}
