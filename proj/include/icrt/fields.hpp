#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "icrt/loopmetric.hpp"

namespace icrt {

// Brownian bridge on [a,b] pinned at va, vb, evaluated at t by midpoint
// refinement with normals drawn from `key` and the dyadic node index. The
// value at t depends only on (key, a, b, va, vb, t).
double dyadic_bridge(std::uint64_t key, double a, double b, double va, double vb, double t);
// Brownian motion on [0, length] started at 0.
double dyadic_motion(std::uint64_t key, double length, double t);

class FieldRealization {
public:
    FieldRealization(const IcrtSample& s, std::uint64_t field_seed);

    std::uint64_t seed() const { return seed_; }
    const IcrtSample& sample() const { return *s_; }
    double tree_field(double x) const;
    double bridge(std::size_t atom, double u) const;
    double fennec(const LoopPoint& a) const;
    // Key of the bridge attached to an atom.
    std::uint64_t bridge_key(std::size_t atom) const;

private:
    const IcrtSample* s_;
    std::uint64_t seed_;
};

std::vector<double> sample_tree_field(const IcrtSample& s, std::uint64_t field_seed,
                                      const std::vector<double>& queries);
std::vector<double> sample_bridge(const FieldRealization& r, std::size_t atom,
                                  const std::vector<double>& angles);
double fennec_value(const IcrtSample& s, const FieldRealization& r, const LoopPoint& a);

// Random functions D_i on [0,1] used by generalized fields. `value` and
// `sup_norm` must be deterministic in (seed, i, u).
struct GeneralizedField {
    std::string name;
    double kappa = 4.0;
    std::function<double(std::uint64_t seed, std::size_t atom, double u)> value;
    std::function<double(std::uint64_t seed, std::size_t atom)> sup_norm;
};

struct FieldAudit {
    double mean = 0.0;
    double mean_se = 0.0;
    double sup_moment = 0.0;
    bool zero_at_origin = true;
    bool passed = false;
};

class FieldRegistry {
public:
    // Empirical audit: D(0) = 0, centered values, E sup|D|^kappa <= 1. Throws InvalidInput on failure.
    FieldAudit register_field(GeneralizedField f, std::size_t audit_samples = 10000);
    const GeneralizedField& get(const std::string& name) const;
    bool contains(const std::string& name) const { return fields_.count(name) != 0; }

    static FieldAudit audit(const GeneralizedField& f, std::size_t samples);

private:
    std::map<std::string, GeneralizedField> fields_;
};

// Built-in fields.
GeneralizedField bridge_field(double kappa = 4.0);  // same bridges as the fennec
GeneralizedField zero_field();
GeneralizedField rademacher_tent_field(double kappa = 4.0);

// sum_{i=n}^{m} sqrt(theta_i) D_i(U_{X_i, a}); atom indices are 1-based.
double generalized_partial_sum(const IcrtSample& s, const FieldRegistry& reg, const std::string& name,
                               std::uint64_t field_seed, const LoopPoint& a, std::size_t n,
                               std::size_t m);
// max over probes and n, m >= N of |partial sum|.
double uniform_tail(const IcrtSample& s, const FieldRegistry& reg, const std::string& name,
                    std::uint64_t field_seed, std::size_t N, const std::vector<LoopPoint>& probes);
// Loop points (X_i, j / per_atom) for atoms inside the truncation, j = 0..per_atom.
std::vector<LoopPoint> atom_probes(const IcrtSample& s, std::size_t per_atom);

}  // namespace icrt
