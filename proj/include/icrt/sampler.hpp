#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "icrt/rng.hpp"
#include "icrt/skeleton.hpp"

namespace icrt {

struct ThetaSpec {
    double theta0 = 0.0;
    std::vector<double> weights;  // nonincreasing, positive

    void validate() const;
    double theta0_sq() const { return theta0 * theta0; }

    // theta_i proportional to i^{-1/alpha}, scaled so theta0^2 + sum theta_i^2 = 1.
    static ThetaSpec power_law(double alpha, std::size_t K, double theta0 = 0.0);
    // theta0 derived from the weights when not given.
    static ThetaSpec from_weights(std::vector<double> weights, std::optional<double> theta0 = {});
    static ThetaSpec brownian() { return ThetaSpec{1.0, {}}; }
};

// Atom positions X_i (index order, weights nonincreasing) plus the density theta0^2.
class MeasureState {
public:
    MeasureState() = default;
    MeasureState(double theta0_sq, std::vector<double> x, std::vector<double> theta);

    double theta0_sq() const { return theta0_sq_; }
    std::size_t atom_count() const { return x_.size(); }
    double x(std::size_t i) const { return x_[i]; }
    double theta(std::size_t i) const { return theta_[i]; }
    const std::vector<double>& positions() const { return x_; }
    const std::vector<double>& weights() const { return theta_; }

    // mu[0, l].
    double mass_prefix(double l) const;
    // Atoms sorted by position; prefix weights aligned with `sorted()`.
    const std::vector<std::size_t>& sorted() const { return by_pos_; }
    // Sum of weights of atoms with position <= l.
    double atom_mass_prefix(double l) const;
    // Number of atoms with position <= l.
    std::size_t atoms_upto(double l) const;
    // Atom (index order) at which the cumulative weight in position order first exceeds w,
    // restricted to the first n sorted atoms.
    std::size_t atom_for_mass(double w, std::size_t n) const;
    // Index of the atom sitting exactly at x, if any.
    std::optional<std::size_t> atom_at(double x) const;

private:
    double theta0_sq_ = 0.0;
    std::vector<double> x_, theta_;
    std::vector<std::size_t> by_pos_;
    std::vector<double> sorted_x_;
    std::vector<double> prefix_;  // prefix_[k] = weight of the first k sorted atoms
};

double mass_prefix(const MeasureState& m, double l);
double expected_mass_prefix(const ThetaSpec& spec, double l);

struct StopRule {
    enum class Kind { Level, Branches } kind = Kind::Level;
    double level = 0.0;
    std::size_t branches = 0;
    std::size_t safety_cap = 20'000'000;

    static StopRule at_level(double l) { return StopRule{Kind::Level, l, 0}; }
    // Truncate at Y_n: the tree then has exactly n branches.
    static StopRule with_branches(std::size_t n) { return StopRule{Kind::Branches, 0.0, n}; }
};

struct CutResult {
    std::vector<double> cuts;  // Y_1 < ... < Y_n, all below `level`
    double level;
};

// Corruptions used only by negative controls.
enum class Corruption { None, GlueAtRoot, ConstantAngles };

struct AngleTable {
    std::vector<double> atom;  // U_{X,i}, index order
    std::vector<double> glue;  // U_{Z,i}, one per cut
};

class IcrtSample {
public:
    IcrtSample() = default;
    IcrtSample(ThetaSpec spec, MeasureState measure, std::vector<double> cuts,
               std::vector<double> glues, AngleTable angles, std::uint64_t seed, double level);

    const ThetaSpec& spec() const { return spec_; }
    const MeasureState& measure() const { return measure_; }
    const Skeleton& skeleton() const { return skeleton_; }
    const AngleTable& angles() const { return angles_; }
    const std::vector<double>& cuts() const { return cuts_; }
    const std::vector<double>& glues() const { return glues_; }
    std::uint64_t seed() const { return seed_; }
    double level() const { return level_; }
    double theta0_sq() const { return measure_.theta0_sq(); }

    // Atoms inside the truncation on branch b, sorted by position.
    const std::vector<std::size_t>& branch_atoms(std::size_t b) const { return branch_atoms_[b]; }
    std::optional<std::size_t> atom_at(double x) const;
    // Angle of the continuing direction along x's branch: U_{X,i} at an atom, else 1/2.
    double continuing_angle(double x) const;
    // Angle of branch b >= 1 at its glue point.
    double glue_angle(std::size_t b) const { return angles_.glue[b - 1]; }
    // mu[0,l]
    double mass_prefix(double l) const { return measure_.mass_prefix(l); }

    void audit() const;
    nlohmann::json to_json() const;
    static IcrtSample from_json(const nlohmann::json& j);

private:
    ThetaSpec spec_;
    MeasureState measure_;
    std::vector<double> cuts_, glues_;
    AngleTable angles_;
    std::uint64_t seed_ = 0;
    double level_ = 0.0;
    Skeleton skeleton_;
    std::vector<std::vector<std::size_t>> branch_atoms_;
};

MeasureState sample_atoms(const ThetaSpec& spec, Rng& rng);
CutResult sample_cuts(const MeasureState& m, Rng& rng, const StopRule& stop);
std::vector<double> sample_glue(const MeasureState& m, const std::vector<double>& cuts, Rng& rng);
AngleTable sample_angles(const MeasureState& m, const std::vector<double>& cuts,
                         const std::vector<double>& glues, Rng& rng);
IcrtSample sample_icrt(const ThetaSpec& spec, std::uint64_t seed, const StopRule& stop,
                       Corruption corruption = Corruption::None);

// Cumulative cut intensity Lambda(l) = int_0^l mu[0,s] ds.
double cumulative_rate(const MeasureState& m, double l);

// Draw a point of the tree from mu restricted to [0,l], normalized.
double sample_tree_point(const IcrtSample& s, double l, Rng& rng);

}  // namespace icrt
