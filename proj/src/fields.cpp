#include "icrt/fields.hpp"

#include <algorithm>
#include <cmath>

#include "icrt/error.hpp"

namespace icrt {

double dyadic_bridge(std::uint64_t key, double a, double b, double va, double vb, double t) {
    if (t <= a) return va;
    if (t >= b) return vb;
    std::uint64_t node = 1;
    for (int depth = 0; depth < 62; ++depth) {
        const double mid = 0.5 * (a + b);
        if (!(mid > a && mid < b)) break;
        const double vm = 0.5 * (va + vb) + std::sqrt(0.25 * (b - a)) * hashed_normal(hash_combine(key, node));
        if (t == mid) return vm;
        if (t < mid) {
            b = mid;
            vb = vm;
            node = 2 * node;
        } else {
            a = mid;
            va = vm;
            node = 2 * node + 1;
        }
    }
    return va + (vb - va) * (t - a) / (b - a);
}

double dyadic_motion(std::uint64_t key, double length, double t) {
    if (t <= 0.0) return 0.0;
    const double end = std::sqrt(length) * hashed_normal(hash_combine(key, 0));
    return dyadic_bridge(key, 0.0, length, 0.0, end, t);
}

FieldRealization::FieldRealization(const IcrtSample& s, std::uint64_t field_seed)
    : s_(&s), seed_(field_seed) {}

std::uint64_t FieldRealization::bridge_key(std::size_t atom) const {
    return hash_combine(hash_combine(mix64(seed_), hash_name("bridge")), atom);
}

double FieldRealization::tree_field(double x) const {
    const Skeleton& sk = s_->skeleton();
    const std::uint64_t base = hash_combine(mix64(seed_), hash_name("tree"));
    double v = 0.0;
    for (const ChainStep& st : sk.chain(x)) {
        const Branch& br = sk.branch(st.branch);
        v += dyadic_motion(hash_combine(base, st.branch), br.end - br.start, st.pos - br.start);
    }
    return v;
}

double FieldRealization::bridge(std::size_t atom, double u) const {
    if (!(u >= 0.0 && u <= 1.0)) throw OutOfRange("bridge angle outside [0,1]");
    return dyadic_bridge(bridge_key(atom), 0.0, 1.0, 0.0, 0.0, u);
}

double FieldRealization::fennec(const LoopPoint& a) const {
    const MeasureState& m = s_->measure();
    double v = std::sqrt(s_->theta0_sq() / 6.0) * tree_field(a.x);
    for_each_path_atom(*s_, LoopPoint{0.0, 0.0}, a, [&](std::size_t i, double, double ua) {
        v += std::sqrt(m.theta(i)) * bridge(i, ua);
    });
    return v;
}

std::vector<double> sample_tree_field(const IcrtSample& s, std::uint64_t field_seed,
                                      const std::vector<double>& queries) {
    const FieldRealization r(s, field_seed);
    std::vector<double> out;
    out.reserve(queries.size());
    for (double x : queries) out.push_back(r.tree_field(x));
    return out;
}

std::vector<double> sample_bridge(const FieldRealization& r, std::size_t atom,
                                  const std::vector<double>& angles) {
    std::vector<double> out;
    out.reserve(angles.size());
    for (double u : angles) out.push_back(r.bridge(atom, u));
    return out;
}

double fennec_value(const IcrtSample& s, const FieldRealization& r, const LoopPoint& a) {
    if (&r.sample() != &s) throw InvalidInput("field realization belongs to another sample");
    return r.fennec(a);
}

FieldAudit FieldRegistry::audit(const GeneralizedField& f, std::size_t samples) {
    FieldAudit out;
    if (samples < 2) throw InvalidInput("audit needs at least two samples");
    Rng rng = Rng::substream(0x5eedULL, "field-audit");
    double sum = 0.0, sum2 = 0.0, sup = 0.0;
    for (std::size_t t = 0; t < samples; ++t) {
        const std::uint64_t seed = rng.bits();
        const std::size_t atom = t % 64;
        if (f.value(seed, atom, 0.0) != 0.0) out.zero_at_origin = false;
        const double v = f.value(seed, atom, rng.uniform01());
        sum += v;
        sum2 += v * v;
        sup += std::pow(f.sup_norm(seed, atom), f.kappa);
    }
    const double n = static_cast<double>(samples);
    out.mean = sum / n;
    const double var = std::max(0.0, (sum2 - n * out.mean * out.mean) / (n - 1.0));
    out.mean_se = std::sqrt(var / n);
    out.sup_moment = sup / n;
    out.passed = out.zero_at_origin && std::abs(out.mean) <= 4.0 * out.mean_se + 1e-12 &&
                 out.sup_moment <= 1.05;
    return out;
}

FieldAudit FieldRegistry::register_field(GeneralizedField f, std::size_t audit_samples) {
    if (f.name.empty()) throw InvalidInput("generalized field needs a name");
    if (!(f.kappa >= 2.0)) throw InvalidInput("generalized field needs kappa >= 2");
    if (!f.value || !f.sup_norm) throw InvalidInput("generalized field needs value and sup_norm");
    const FieldAudit a = audit(f, audit_samples);
    if (!a.passed)
        throw InvalidInput("field '" + f.name + "' fails the field audit (mean " +
                           std::to_string(a.mean) + ", sup moment " + std::to_string(a.sup_moment) +
                           ")");
    fields_[f.name] = std::move(f);
    return a;
}

const GeneralizedField& FieldRegistry::get(const std::string& name) const {
    const auto it = fields_.find(name);
    if (it == fields_.end()) throw InvalidInput("unregistered field '" + name + "'");
    return it->second;
}

GeneralizedField bridge_field(double kappa) {
    GeneralizedField f;
    f.name = "bridge";
    f.kappa = kappa;
    auto key = [](std::uint64_t seed, std::size_t atom) {
        return hash_combine(hash_combine(mix64(seed), hash_name("bridge")), atom);
    };
    f.value = [key](std::uint64_t seed, std::size_t atom, double u) {
        return dyadic_bridge(key(seed, atom), 0.0, 1.0, 0.0, 0.0, u);
    };
    f.sup_norm = [key](std::uint64_t seed, std::size_t atom) {
        double s = 0.0;
        const std::uint64_t k = key(seed, atom);
        for (int j = 1; j < 1024; ++j)
            s = std::max(s, std::abs(dyadic_bridge(k, 0.0, 1.0, 0.0, 0.0, j / 1024.0)));
        return s;
    };
    return f;
}

GeneralizedField zero_field() {
    GeneralizedField f;
    f.name = "zero";
    f.kappa = 4.0;
    f.value = [](std::uint64_t, std::size_t, double) { return 0.0; };
    f.sup_norm = [](std::uint64_t, std::size_t) { return 0.0; };
    return f;
}

GeneralizedField rademacher_tent_field(double kappa) {
    GeneralizedField f;
    f.name = "rademacher_tent";
    f.kappa = kappa;
    auto sign = [](std::uint64_t seed, std::size_t atom) {
        return (hash_combine(hash_combine(mix64(seed), hash_name("tent")), atom) >> 63) ? 1.0 : -1.0;
    };
    f.value = [sign](std::uint64_t seed, std::size_t atom, double u) {
        return sign(seed, atom) * 2.0 * std::min(u, 1.0 - u);
    };
    f.sup_norm = [](std::uint64_t, std::size_t) { return 1.0; };
    return f;
}

namespace {

// (1-based index, sqrt(theta) * D(U)) for atoms on the root path of a.
std::vector<std::pair<std::size_t, double>> path_terms(const IcrtSample& s, const GeneralizedField& f,
                                                       std::uint64_t seed, const LoopPoint& a) {
    std::vector<std::pair<std::size_t, double>> terms;
    const MeasureState& m = s.measure();
    for_each_path_atom(s, LoopPoint{0.0, 0.0}, a, [&](std::size_t i, double, double ua) {
        terms.emplace_back(i + 1, std::sqrt(m.theta(i)) * f.value(seed, i, ua));
    });
    std::sort(terms.begin(), terms.end());
    return terms;
}

}  // namespace

double generalized_partial_sum(const IcrtSample& s, const FieldRegistry& reg, const std::string& name,
                               std::uint64_t field_seed, const LoopPoint& a, std::size_t n,
                               std::size_t m) {
    const GeneralizedField& f = reg.get(name);
    if (n > m) throw InvalidInput("partial sum needs n <= m");
    double v = 0.0;
    for (const auto& [i, t] : path_terms(s, f, field_seed, a))
        if (i >= n && i <= m) v += t;
    return v;
}

double uniform_tail(const IcrtSample& s, const FieldRegistry& reg, const std::string& name,
                    std::uint64_t field_seed, std::size_t N, const std::vector<LoopPoint>& probes) {
    const GeneralizedField& f = reg.get(name);
    if (probes.empty()) throw InvalidInput("uniform_tail needs probes");
    double best = 0.0;
    for (const LoopPoint& p : probes) {
        double run = 0.0, lo = 0.0, hi = 0.0;
        for (const auto& [i, t] : path_terms(s, f, field_seed, p)) {
            if (i < N) continue;
            run += t;
            lo = std::min(lo, run);
            hi = std::max(hi, run);
        }
        best = std::max(best, hi - lo);
    }
    return best;
}

std::vector<LoopPoint> atom_probes(const IcrtSample& s, std::size_t per_atom) {
    std::vector<LoopPoint> out;
    const MeasureState& m = s.measure();
    for (std::size_t b = 0; b < s.skeleton().branch_count(); ++b)
        for (std::size_t i : s.branch_atoms(b))
            for (std::size_t j = 0; j <= per_atom; ++j)
                out.push_back({m.x(i), static_cast<double>(j) / static_cast<double>(per_atom)});
    return out;
}

}  // namespace icrt
