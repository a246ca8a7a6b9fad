#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "icrt/analysis.hpp"

namespace icrt {

inline constexpr const char* kVersion = "0.3.0";

// Hand-checkable sample: cuts 1, 2 below level 3, glues 0.5, 1.5, theta0^2 = 0.55,
// atoms 0.6 at 0.25 (U 0.2) and 0.3 at 1.25 (U 0.8), glue angles 0.7, 0.4.
IcrtSample fixture_sample();

// "brownian" (theta0 = 1), "cycle" (theta_1 = 1), "powerlaw" (alpha 1.5, 1000 atoms).
ThetaSpec named_spec(const std::string& name);
const std::vector<std::string>& named_specs();

// Mixture of nu_L draws, atom and glue points, exact root points and points in front
// of earlier draws; the latter make the front relation visible.
class PointGenerator {
public:
    PointGenerator(const IcrtSample& s, double l, std::uint64_t seed);
    LoopPoint next();

private:
    const IcrtSample* s_;
    double l_;
    Rng rng_;
    std::vector<LoopPoint> recent_;
};

struct SuiteConfig {
    std::uint64_t seed = 1;
    std::size_t seeds = 0;  // 0: per-suite default
    std::size_t jobs = 1;
    nlohmann::json to_json() const;
};

// Individual checks, sized by their arguments.
TestReport metric_axioms_report(const IcrtSample& s, const std::string& label, std::size_t triples,
                                std::uint64_t seed);
TestReport path_mass_report(const ThetaSpec& spec, const std::string& label, std::size_t samples,
                            std::size_t pairs_per_sample, std::uint64_t seed);
TestReport crucial_bound_report(const ThetaSpec& spec, const std::string& label, std::size_t samples,
                                std::size_t pairs_per_sample, std::uint64_t seed);
TestReport order_axioms_report(const IcrtSample& s, const std::string& label, std::size_t triples,
                               std::uint64_t seed);
// Exact left mass against hit counting with compare over nu_L draws.
TestReport left_mass_oracle_report(const IcrtSample& s, const std::string& label, std::size_t points,
                                   std::size_t draws, std::uint64_t seed);
TestReport fennec_variance_report(const IcrtSample& s, const std::string& label, std::size_t pairs,
                                  std::size_t field_seeds, std::uint64_t seed);
TestReport contour_report(const IcrtSample& s, const std::string& label, std::size_t queries,
                          std::uint64_t seed);
TestReport holder_report(const ThetaSpec& spec, double level, std::size_t samples, std::size_t grid,
                         std::uint64_t seed);
TestReport theoretical_dims_report(const std::string& name);
TestReport boxcount_report(const ThetaSpec& spec, const std::string& label, double level,
                           std::size_t points, double expected, std::uint64_t seed);
TestReport tail_report(const ThetaSpec& spec, const std::string& label, std::size_t seeds,
                       double expected, double tol, std::uint64_t seed);
TestReport negative_control(TestReport r);

const std::vector<std::string>& suite_names();
std::vector<TestReport> run_suite(const std::string& name, const SuiteConfig& cfg);
// Bonferroni over the statistical reports; returns the adjusted threshold.
double apply_bonferroni(std::vector<TestReport>& reports, double level = 0.01);
bool all_passed(const std::vector<TestReport>& reports);
nlohmann::json suite_json(const std::string& name, const SuiteConfig& cfg,
                          const std::vector<TestReport>& reports);

}  // namespace icrt
