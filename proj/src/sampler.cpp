#include "icrt/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "icrt/error.hpp"

namespace icrt {

void ThetaSpec::validate() const {
    if (!(theta0 >= 0.0) || !std::isfinite(theta0)) throw InvalidInput("theta0 must be >= 0");
    double sq = theta0 * theta0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
            throw InvalidInput("theta_" + std::to_string(i + 1) + " must be positive", i);
        if (i > 0 && weights[i] > weights[i - 1])
            throw InvalidInput("weights must be nonincreasing (theta_" + std::to_string(i + 1) +
                                   " > theta_" + std::to_string(i) + ")",
                               i);
        sq += weights[i] * weights[i];
    }
    if (std::abs(sq - 1.0) > 1e-9)
        throw InvalidInput("theta0^2 + sum theta_i^2 must equal 1 (got " + std::to_string(sq) + ")");
}

ThetaSpec ThetaSpec::power_law(double alpha, std::size_t K, double theta0) {
    if (!(alpha > 1.0) || !std::isfinite(alpha)) throw InvalidInput("power-law alpha must be > 1");
    if (!(theta0 >= 0.0 && theta0 <= 1.0)) throw InvalidInput("theta0 must lie in [0,1]");
    if (K == 0 && theta0 != 1.0) throw InvalidInput("K = 0 requires theta0 = 1");
    ThetaSpec s;
    s.theta0 = theta0;
    s.weights.resize(K);
    double h = 0.0;
    // Sum small terms first.
    for (std::size_t i = K; i >= 1; --i) h += std::pow(static_cast<double>(i), -2.0 / alpha);
    const double c = std::sqrt((1.0 - theta0 * theta0) / h);
    for (std::size_t i = 0; i < K; ++i)
        s.weights[i] = c * std::pow(static_cast<double>(i + 1), -1.0 / alpha);
    s.validate();
    return s;
}

ThetaSpec ThetaSpec::from_weights(std::vector<double> weights, std::optional<double> theta0) {
    ThetaSpec s;
    s.weights = std::move(weights);
    if (theta0) {
        s.theta0 = *theta0;
    } else {
        double sq = 0.0;
        for (double w : s.weights) sq += w * w;
        if (sq > 1.0 + 1e-9) throw InvalidInput("sum theta_i^2 exceeds 1");
        s.theta0 = std::sqrt(std::max(0.0, 1.0 - sq));
    }
    s.validate();
    return s;
}

MeasureState::MeasureState(double theta0_sq, std::vector<double> x, std::vector<double> theta)
    : theta0_sq_(theta0_sq), x_(std::move(x)), theta_(std::move(theta)) {
    if (x_.size() != theta_.size()) throw InvalidInput("atom positions and weights differ in size");
    by_pos_.resize(x_.size());
    std::iota(by_pos_.begin(), by_pos_.end(), std::size_t{0});
    std::stable_sort(by_pos_.begin(), by_pos_.end(),
                     [&](std::size_t a, std::size_t b) { return x_[a] < x_[b]; });
    sorted_x_.resize(x_.size());
    prefix_.assign(x_.size() + 1, 0.0);
    for (std::size_t k = 0; k < by_pos_.size(); ++k) {
        sorted_x_[k] = x_[by_pos_[k]];
        prefix_[k + 1] = prefix_[k] + theta_[by_pos_[k]];
    }
}

std::size_t MeasureState::atoms_upto(double l) const {
    return static_cast<std::size_t>(std::upper_bound(sorted_x_.begin(), sorted_x_.end(), l) -
                                    sorted_x_.begin());
}

double MeasureState::atom_mass_prefix(double l) const { return prefix_[atoms_upto(l)]; }

double MeasureState::mass_prefix(double l) const {
    if (!(l >= 0.0)) throw InvalidInput("mass_prefix needs l >= 0");
    return theta0_sq_ * l + atom_mass_prefix(l);
}

std::optional<std::size_t> MeasureState::atom_at(double x) const {
    const auto it = std::lower_bound(sorted_x_.begin(), sorted_x_.end(), x);
    if (it == sorted_x_.end() || *it != x) return std::nullopt;
    return by_pos_[static_cast<std::size_t>(it - sorted_x_.begin())];
}

std::size_t MeasureState::atom_for_mass(double w, std::size_t n) const {
    if (n == 0) throw InvalidInput("no atoms to select from");
    auto it = std::upper_bound(prefix_.begin() + 1, prefix_.begin() + static_cast<long>(n) + 1, w);
    std::size_t k = static_cast<std::size_t>(it - prefix_.begin()) - 1;
    if (k >= n) k = n - 1;
    return by_pos_[k];
}

double mass_prefix(const MeasureState& m, double l) { return m.mass_prefix(l); }

double expected_mass_prefix(const ThetaSpec& spec, double l) {
    if (!(l >= 0.0)) throw InvalidInput("expected_mass_prefix needs l >= 0");
    double s = 0.0;
    for (std::size_t i = spec.weights.size(); i-- > 0;) {
        const double t = spec.weights[i];
        s += -t * std::expm1(-t * l);
    }
    return spec.theta0_sq() * l + s;
}

double cumulative_rate(const MeasureState& m, double l) {
    double atoms = 0.0;
    for (std::size_t k = 0; k < m.atom_count(); ++k)
        if (m.x(k) <= l) atoms += m.theta(k) * (l - m.x(k));
    return 0.5 * m.theta0_sq() * l * l + atoms;
}

MeasureState sample_atoms(const ThetaSpec& spec, Rng& rng) {
    spec.validate();
    std::vector<double> x(spec.weights.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.exponential(spec.weights[i]);
    return MeasureState(spec.theta0_sq(), std::move(x), spec.weights);
}

CutResult sample_cuts(const MeasureState& m, Rng& rng, const StopRule& stop) {
    if (stop.kind == StopRule::Kind::Level && !(stop.level > 0.0))
        throw InvalidInput("truncation level must be positive");
    if (stop.kind == StopRule::Kind::Branches && stop.branches == 0)
        throw InvalidInput("branch budget must be at least 1");

    const auto& order = m.sorted();
    const double q = m.theta0_sq();
    std::size_t k = 0;       // next atom (sorted) not yet inside the current piece
    double a = 0.0;          // piece start
    double lam_a = 0.0;      // Lambda(a)
    double slope = 0.0;      // mu[0,a]
    double target = 0.0;
    std::vector<double> arrivals;

    auto absorb_atoms_at_a = [&]() {
        while (k < order.size() && m.x(order[k]) <= a) {
            slope += m.theta(order[k]);
            ++k;
        }
    };
    absorb_atoms_at_a();

    const double inf = std::numeric_limits<double>::infinity();
    for (;;) {
        if (arrivals.size() >= stop.safety_cap)
            throw SamplingFailure("cut sampling exceeded the safety cap of " +
                                  std::to_string(stop.safety_cap) + " cuts");
        target += rng.exponential(1.0);
        double t;
        for (;;) {
            const double b = k < order.size() ? m.x(order[k]) : inf;
            const double r = target - lam_a;
            if (slope == 0.0 && q == 0.0) {
                if (b == inf) throw InvalidInput("zero measure: the cut process never starts");
                a = b;
                absorb_atoms_at_a();
                continue;
            }
            const double w = b - a;
            const double lam_b = b == inf ? inf : lam_a + slope * w + 0.5 * q * w * w;
            if (target <= lam_b) {
                const double dt = q > 0.0 ? 2.0 * r / (slope + std::sqrt(slope * slope + 2.0 * q * r))
                                          : r / slope;
                t = std::min(a + dt, b);
                break;
            }
            lam_a = lam_b;
            a = b;
            absorb_atoms_at_a();
        }
        if (stop.kind == StopRule::Kind::Level) {
            if (t >= stop.level) return CutResult{std::move(arrivals), stop.level};
            arrivals.push_back(t);
        } else {
            arrivals.push_back(t);
            if (arrivals.size() == stop.branches) {
                const double lvl = arrivals.back();
                arrivals.pop_back();
                return CutResult{std::move(arrivals), lvl};
            }
        }
    }
}

std::vector<double> sample_glue(const MeasureState& m, const std::vector<double>& cuts, Rng& rng) {
    std::vector<double> z(cuts.size());
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        const double y = cuts[i];
        const std::size_t n = m.atoms_upto(y);
        const double dens = m.theta0_sq() * y;
        const double total = dens + m.atom_mass_prefix(y);
        if (!(total > 0.0)) throw InvalidInput("glue law undefined: mu[0, Y] = 0", i);
        const double v = rng.uniform01() * total;
        if (v < dens) {
            z[i] = std::min(v / m.theta0_sq(), y);
        } else {
            z[i] = m.x(m.atom_for_mass(v - dens, n));
        }
    }
    return z;
}

AngleTable sample_angles(const MeasureState& m, const std::vector<double>& cuts,
                         const std::vector<double>& glues, Rng& rng) {
    if (glues.size() != cuts.size()) throw InvalidInput("one glue per cut expected");
    AngleTable t;
    t.atom.resize(m.atom_count());
    for (auto& u : t.atom) u = rng.uniform01();
    t.glue.resize(glues.size());
    for (auto& u : t.glue) u = rng.uniform01();
    return t;
}

IcrtSample sample_icrt(const ThetaSpec& spec, std::uint64_t seed, const StopRule& stop,
                       Corruption corruption) {
    Rng atoms_rng = Rng::substream(seed, "atoms");
    Rng cuts_rng = Rng::substream(seed, "cuts");
    Rng glue_rng = Rng::substream(seed, "glues");
    Rng angle_rng = Rng::substream(seed, "angles");
    MeasureState m = sample_atoms(spec, atoms_rng);
    CutResult c = sample_cuts(m, cuts_rng, stop);
    std::vector<double> z = sample_glue(m, c.cuts, glue_rng);
    AngleTable a = sample_angles(m, c.cuts, z, angle_rng);
    if (corruption == Corruption::GlueAtRoot) std::fill(z.begin(), z.end(), 0.0);
    if (corruption == Corruption::ConstantAngles) {
        std::fill(a.atom.begin(), a.atom.end(), 0.5);
        std::fill(a.glue.begin(), a.glue.end(), 0.5);
    }
    return IcrtSample(spec, std::move(m), std::move(c.cuts), std::move(z), std::move(a), seed,
                      c.level);
}

IcrtSample::IcrtSample(ThetaSpec spec, MeasureState measure, std::vector<double> cuts,
                       std::vector<double> glues, AngleTable angles, std::uint64_t seed,
                       double level)
    : spec_(std::move(spec)),
      measure_(std::move(measure)),
      cuts_(std::move(cuts)),
      glues_(std::move(glues)),
      angles_(std::move(angles)),
      seed_(seed),
      level_(level) {
    if (glues_.size() != cuts_.size()) throw InvalidInput("one glue per cut expected");
    if (angles_.glue.size() != cuts_.size() || angles_.atom.size() != measure_.atom_count())
        throw InvalidInput("angle table does not match the sample");
    if (!cuts_.empty() && !(level_ > cuts_.back()))
        throw InvalidInput("truncation level must exceed the last cut");
    CutGlueSequence seq;
    seq.cuts = cuts_;
    seq.cuts.push_back(level_);
    seq.glues = glues_;
    skeleton_ = Skeleton::build(seq);
    branch_atoms_.assign(skeleton_.branch_count(), {});
    for (std::size_t idx : measure_.sorted()) {
        const double x = measure_.x(idx);
        if (x > level_) break;
        branch_atoms_[skeleton_.branch_of(x)].push_back(idx);
    }
}

std::optional<std::size_t> IcrtSample::atom_at(double x) const {
    auto a = measure_.atom_at(x);
    if (a && measure_.x(*a) > level_) return std::nullopt;
    return a;
}

double IcrtSample::continuing_angle(double x) const {
    const auto a = atom_at(x);
    return a ? angles_.atom[*a] : 0.5;
}

void IcrtSample::audit() const {
    spec_.validate();
    for (std::size_t i = 0; i < cuts_.size(); ++i) {
        if (i > 0 && !(cuts_[i] > cuts_[i - 1])) throw InvalidInput("cuts not increasing", i);
        if (!(glues_[i] >= 0.0 && glues_[i] <= cuts_[i]))
            throw InvalidInput("glue outside [0, Y_i]", i);
    }
    for (std::size_t i = 0; i < angles_.atom.size(); ++i)
        if (!(angles_.atom[i] >= 0.0 && angles_.atom[i] <= 1.0))
            throw InvalidInput("atom angle outside [0,1]", i);
    for (std::size_t i = 0; i < angles_.glue.size(); ++i)
        if (!(angles_.glue[i] >= 0.0 && angles_.glue[i] <= 1.0))
            throw InvalidInput("glue angle outside [0,1]", i);
    std::size_t inside = 0;
    for (const auto& v : branch_atoms_) inside += v.size();
    if (inside != measure_.atoms_upto(level_)) throw InvalidInput("atom index incomplete");
}

nlohmann::json IcrtSample::to_json() const {
    nlohmann::json atoms = nlohmann::json::array();
    for (std::size_t i = 0; i < measure_.atom_count(); ++i)
        atoms.push_back({{"x", measure_.x(i)}, {"theta", measure_.theta(i)}, {"u", angles_.atom[i]}});
    nlohmann::json glues = nlohmann::json::array();
    for (std::size_t i = 0; i < glues_.size(); ++i)
        glues.push_back({{"z", glues_[i]}, {"u", angles_.glue[i]}});
    nlohmann::json j;
    j["theta0"] = spec_.theta0;
    j["atoms"] = std::move(atoms);
    j["cuts"] = cuts_;
    j["glues"] = std::move(glues);
    j["seed"] = seed_;
    j["level"] = level_;
    return j;
}

IcrtSample IcrtSample::from_json(const nlohmann::json& j) {
    ThetaSpec spec;
    spec.theta0 = j.at("theta0").get<double>();
    std::vector<double> x;
    AngleTable angles;
    for (const auto& a : j.at("atoms")) {
        x.push_back(a.at("x").get<double>());
        spec.weights.push_back(a.at("theta").get<double>());
        angles.atom.push_back(a.at("u").get<double>());
    }
    spec.validate();
    std::vector<double> glues;
    for (const auto& g : j.at("glues")) {
        glues.push_back(g.at("z").get<double>());
        angles.glue.push_back(g.at("u").get<double>());
    }
    MeasureState m(spec.theta0_sq(), std::move(x), spec.weights);
    IcrtSample s(spec, std::move(m), j.at("cuts").get<std::vector<double>>(), std::move(glues),
                 std::move(angles), j.at("seed").get<std::uint64_t>(), j.at("level").get<double>());
    s.audit();
    return s;
}

double sample_tree_point(const IcrtSample& s, double l, Rng& rng) {
    const MeasureState& m = s.measure();
    const double dens = m.theta0_sq() * l;
    const std::size_t n = m.atoms_upto(l);
    const double total = dens + m.atom_mass_prefix(l);
    if (!(total > 0.0)) throw InvalidInput("zero mass on [0, l]");
    const double v = rng.uniform01() * total;
    if (v < dens) return std::min(v / m.theta0_sq(), l);
    return m.x(m.atom_for_mass(v - dens, n));
}

}  // namespace icrt
