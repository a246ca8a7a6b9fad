#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "icrt/contour.hpp"

namespace icrt {

struct TestReport {
    std::string name;
    std::string statistic;
    // exact | tolerance | statistical | control; suites apply Bonferroni to "statistical".
    std::string kind = "exact";
    double value = 0.0;
    double p_value = 1.0;
    bool passed = false;
    nlohmann::json details = nlohmann::json::object();
    nlohmann::json to_json() const;
};

// theta_i = c i^{-1/alpha} for i <= K; K may be far beyond what can be stored.
class PowerLawFamily {
public:
    PowerLawFamily(double alpha, double K, double theta0 = 0.0);
    double alpha() const { return alpha_; }
    double K() const { return K_; }
    double theta0() const { return theta0_; }
    double scale() const { return c_; }
    double weight(double i) const;
    double expected_mass(double l) const;
    // Explicit spec with the first k weights of this family renormalized.
    ThetaSpec truncate(std::size_t k) const;

private:
    double alpha_, K_, theta0_, c_;
};

std::vector<double> log_grid(double lo, double hi, std::size_t per_decade);

struct DimPair {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> window_slopes;  // 1 + slope per one-decade window
};
DimPair theoretical_dims(const std::function<double(double)>& expected_mass,
                         const std::vector<double>& l_grid);
DimPair theoretical_dims(const ThetaSpec& spec, const std::vector<double>& l_grid);
DimPair theoretical_dims(const PowerLawFamily& family, const std::vector<double>& l_grid);

struct BoxCount {
    double dimension = 0.0;
    double slope_se = 0.0;
    std::vector<double> eps;
    std::vector<std::size_t> counts;
    double radius = 0.0;  // max distance from the first point
};
using LoopDistance = std::function<double(const LoopPoint&, const LoopPoint&)>;
// N_eps is the smallest greedy cover over `restarts` shuffled orders (the first in input order).
BoxCount boxcount_dimension(const std::vector<LoopPoint>& points, const LoopDistance& dist,
                            const std::vector<double>& eps_grid, std::size_t restarts = 8,
                            std::uint64_t seed = 0);
// Scales at which a cloud on [0,l] sees the whole tree: from twice the Hausdorff gap
// between [0,l] and (l, level] up to half the cloud radius, ratio 2^(1/4). Needs level > l.
struct BoxScales {
    std::vector<double> eps;
    double gap = 0.0;
    double radius = 0.0;
};
BoxScales boxcount_scales(const IcrtSample& s, double l, const std::vector<LoopPoint>& cloud, Rng& rng);

struct LocalMass {
    std::vector<double> exponents;     // one per center with a usable fit
    std::vector<std::size_t> dropped;  // per center: eps values dropped for empty balls
    bool flagged = false;              // some eps dropped or some center unusable
};
LocalMass local_mass_exponents(const IcrtSample& s, double l, const std::vector<LoopPoint>& centers,
                               const std::vector<double>& eps_grid,
                               const std::vector<LoopPoint>& cloud);
// Same, with a cloud of `cloud_size` draws from nu_L on [0,l]; a massless truncation
// leaves the cloud empty and every center flagged.
LocalMass local_mass_exponents(const IcrtSample& s, double l, const std::vector<LoopPoint>& centers,
                               const std::vector<double>& eps_grid, std::size_t cloud_size, Rng& rng);

struct SeedRange {
    std::uint64_t first = 1;
    std::size_t count = 1000;
};

// Runs fn(k) for k in [0, n) over `jobs` threads; results are positional.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

struct ReportOptions {
    std::size_t jobs = 1;
    Corruption corruption = Corruption::None;
};

TestReport reroot_test(const ThetaSpec& spec, SeedRange seeds, std::size_t pair_budget,
                       const ReportOptions& opt = {});
TestReport permutation_invariance_test(const ThetaSpec& spec, SeedRange seeds, std::size_t k,
                                       const ReportOptions& opt = {});
// distances d_T(Y_i, Y_j) (i, j leaf indices, Y_0 = 0) and whether atom 1 lies on the path.
struct LeafPairSample {
    std::vector<double> distances;
    std::vector<char> atom_on_path;
};
LeafPairSample leaf_pair_samples(const ThetaSpec& spec, SeedRange seeds, std::size_t leaves,
                                 std::size_t i, std::size_t j, std::uint64_t salt,
                                 const ReportOptions& opt = {});
TestReport polya_urn_test(const ThetaSpec& spec, SeedRange seeds, std::size_t a = 3,
                          std::size_t steps = 8, const ReportOptions& opt = {});
TestReport uniformity_test(const ThetaSpec& spec, SeedRange seeds, std::size_t branches = 32,
                           const ReportOptions& opt = {});

struct TailExponents {
    double lower = 0.0, upper = 0.0, slope = 0.0;
    std::vector<double> eps, tail;
    bool flagged = false;  // empty cells dropped
};
TailExponents tail_exponents(const ThetaSpec& spec, SeedRange seeds, const std::vector<double>& eps_grid,
                             const ReportOptions& opt = {});

enum class StepLaw { Rademacher, CenteredUniform, CenteredExponential, Exponential };
struct VariableSpec {
    StepLaw law = StepLaw::Rademacher;
    std::size_t n = 64;
};
// E|X|^kappa for one step.
double absolute_moment(StepLaw law, double kappa);
double step_mean(StepLaw law);
double concentration_constant(double kappa);
double concentration_v(const VariableSpec& v, double kappa);
TestReport concentration_check(double kappa, const VariableSpec& v, const std::vector<double>& t_grid,
                               std::size_t trials, std::uint64_t seed);

}  // namespace icrt
