#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "icrt/suites.hpp"

namespace icrt {

struct RunConfig {
    std::optional<double> theta0;
    std::string thetas_file;
    std::optional<double> alpha;
    std::size_t K = 1000;
    std::optional<double> level;
    std::optional<std::size_t> branches;
    std::size_t resolution = 0;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    std::string out = "-";
    std::string svg;
    std::string sample_file;  // process: read instead of sampling
    std::size_t grid = 4096;  // process
    std::size_t cloud = 0;    // dims: box-count cloud size, 0 for none
    std::size_t seeds = 0;    // verify
    std::string suite;        // verify

    ThetaSpec spec() const;
    StopRule stop() const;
    nlohmann::json to_json() const;
};

// Default seed from ICRT_LAB_SEED, else 1.
std::uint64_t default_seed();

nlohmann::json cmd_sample(const RunConfig& c);
// CSV text; `svg` receives the plot when c.svg is set.
std::string cmd_process(const RunConfig& c, std::string* svg = nullptr);
nlohmann::json cmd_dims(const RunConfig& c);
nlohmann::json cmd_verify(const RunConfig& c, bool& passed);

// Exit codes: 0 success, 1 usage or input error, 2 suite failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace icrt
