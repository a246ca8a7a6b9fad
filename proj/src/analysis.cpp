#include "icrt/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "icrt/error.hpp"
#include "icrt/stats.hpp"

namespace icrt {

nlohmann::json TestReport::to_json() const {
    return {{"name", name},       {"kind", kind},           {"statistic", statistic}, {"value", value},
            {"p_value", p_value}, {"passed", passed},       {"details", details}};
}

// ---------------------------------------------------------------- dimensions

namespace {

// Euler-Maclaurin pieces for sums over i in [M, K] of a smooth decreasing f.
double em_tail(double integral, double fM, double fK, double dfM, double dfK) {
    return integral + 0.5 * (fM + fK) + (dfK - dfM) / 12.0;
}

constexpr double kHead = 1e4;

}  // namespace

PowerLawFamily::PowerLawFamily(double alpha, double K, double theta0)
    : alpha_(alpha), K_(std::floor(K)), theta0_(theta0) {
    if (!(alpha > 1.0)) throw InvalidInput("power law needs alpha > 1");
    if (!(K_ >= 1.0) || !std::isfinite(K_)) throw InvalidInput("power law needs finite K >= 1");
    if (!(theta0 >= 0.0 && theta0 <= 1.0)) throw InvalidInput("power law needs 0 <= theta0 <= 1");
    const double s = 2.0 / alpha;
    double h = 0.0;
    const double M = std::min(kHead, K_);
    for (double i = 1.0; i < M; i += 1.0) h += std::pow(i, -s);
    if (K_ <= kHead) {
        h += std::pow(K_, -s);
    } else {
        const double integral = std::abs(s - 1.0) < 1e-15
                                    ? std::log(K_ / M)
                                    : (std::pow(K_, 1.0 - s) - std::pow(M, 1.0 - s)) / (1.0 - s);
        h += em_tail(integral, std::pow(M, -s), std::pow(K_, -s), -s * std::pow(M, -s - 1.0),
                     -s * std::pow(K_, -s - 1.0));
    }
    c_ = std::sqrt((1.0 - theta0 * theta0) / h);
}

double PowerLawFamily::weight(double i) const { return c_ * std::pow(i, -1.0 / alpha_); }

double PowerLawFamily::expected_mass(double l) const {
    if (!(l >= 0.0)) throw InvalidInput("expected mass needs l >= 0");
    const double beta = 1.0 / alpha_;
    auto g = [&](double x) {
        const double th = c_ * std::pow(x, -beta);
        return -th * std::expm1(-th * l);
    };
    auto dg = [&](double x) {
        const double h = std::pow(x, -beta);
        const double dh = -beta * std::pow(x, -beta - 1.0);
        const double e = std::exp(-c_ * l * h);
        return c_ * dh * (1.0 - e + c_ * l * h * e);
    };
    double v = theta0_ * theta0_ * l;
    const double M = std::min(kHead, K_);
    for (double i = 1.0; i < M; i += 1.0) v += g(i);
    if (K_ <= kHead) return v + g(K_);
    auto in_log = [&](double s) {
        const double x = std::exp(s);
        return g(x) * x;
    };
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        in_log, std::log(M), std::log(K_), 20, 1e-13);
    return v + em_tail(integral, g(M), g(K_), dg(M), dg(K_));
}

ThetaSpec PowerLawFamily::truncate(std::size_t k) const {
    return ThetaSpec::power_law(alpha_, k, theta0_);
}

std::vector<double> log_grid(double lo, double hi, std::size_t per_decade) {
    if (!(lo > 0.0 && hi > lo) || per_decade == 0) throw InvalidInput("log grid needs 0 < lo < hi");
    const double a = std::log10(lo), b = std::log10(hi);
    const auto n = static_cast<std::size_t>(std::llround((b - a) * static_cast<double>(per_decade)));
    std::vector<double> g;
    for (std::size_t k = 0; k <= n; ++k)
        g.push_back(std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(n)));
    return g;
}

DimPair theoretical_dims(const std::function<double(double)>& expected_mass,
                         const std::vector<double>& l_grid) {
    if (l_grid.size() < 5) throw InvalidInput("dimension grid needs at least 5 points");
    for (std::size_t i = 0; i < l_grid.size(); ++i) {
        if (!(l_grid[i] > 0.0)) throw InvalidInput("dimension grid must be positive", i);
        if (i > 0 && !(l_grid[i] > l_grid[i - 1])) throw InvalidInput("dimension grid must increase", i);
    }
    if (std::log10(l_grid.back() / l_grid.front()) < 4.0 - 1e-9)
        throw InvalidInput("dimension grid must span at least 4 decades");
    std::vector<double> lx, ly;
    for (double l : l_grid) {
        const double m = expected_mass(l);
        if (!(m > 0.0) || !std::isfinite(m)) throw InvalidInput("degenerate grid: expected mass not positive");
        lx.push_back(std::log(l));
        ly.push_back(std::log(m));
    }
    DimPair out;
    const double decade = std::log(10.0);
    for (std::size_t i = 0; i < lx.size(); ++i) {
        std::size_t j = i;
        while (j + 1 < lx.size() && lx[j + 1] - lx[i] <= decade * (1.0 + 1e-9)) ++j;
        if (lx[j] - lx[i] < decade * (1.0 - 1e-9)) break;
        if (j - i < 2) throw InvalidInput("degenerate grid: fewer than 3 points per decade");
        const std::vector<double> wx(lx.begin() + i, lx.begin() + j + 1), wy(ly.begin() + i, ly.begin() + j + 1);
        out.window_slopes.push_back(1.0 + stats::least_squares(wx, wy).slope);
    }
    out.lower = *std::min_element(out.window_slopes.begin(), out.window_slopes.end());
    out.upper = *std::max_element(out.window_slopes.begin(), out.window_slopes.end());
    return out;
}

DimPair theoretical_dims(const ThetaSpec& spec, const std::vector<double>& l_grid) {
    spec.validate();
    return theoretical_dims([&](double l) { return expected_mass_prefix(spec, l); }, l_grid);
}

DimPair theoretical_dims(const PowerLawFamily& family, const std::vector<double>& l_grid) {
    return theoretical_dims([&](double l) { return family.expected_mass(l); }, l_grid);
}

BoxCount boxcount_dimension(const std::vector<LoopPoint>& points, const LoopDistance& dist,
                            const std::vector<double>& eps_grid, std::size_t restarts, std::uint64_t seed) {
    BoxCount out;
    if (points.empty()) throw InvalidInput("box counting needs points");
    for (const LoopPoint& p : points) out.radius = std::max(out.radius, dist(points.front(), p));
    if (out.radius == 0.0) {
        out.eps = eps_grid;
        out.counts.assign(eps_grid.size(), 1);
        return out;
    }
    if (points.size() < 1000) throw InvalidInput("box counting needs at least 10^3 points");
    restarts = std::max<std::size_t>(1, restarts);
    std::vector<std::vector<std::size_t>> orders(restarts, std::vector<std::size_t>(points.size()));
    Rng rng = Rng::substream(seed, "boxcount-orders");
    for (std::size_t k = 0; k < restarts; ++k) {
        std::iota(orders[k].begin(), orders[k].end(), 0);
        if (k > 0)
            for (std::size_t i = points.size(); i > 1; --i) std::swap(orders[k][i - 1], orders[k][rng.index(i)]);
    }
    std::vector<double> x, y;
    bool inside = false;
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        const double eps = eps_grid[e];
        if (!(eps > 0.0)) throw InvalidInput("box counting needs positive eps", e);
        if (eps < 2.0 * out.radius) inside = true;
        std::size_t best = points.size();
        for (const auto& order : orders) {
            std::vector<std::size_t> open = order;
            std::size_t centers = 0;
            while (!open.empty() && centers < best) {
                const LoopPoint c = points[open.front()];
                ++centers;
                std::size_t keep = 0;
                for (std::size_t k = 1; k < open.size(); ++k)
                    if (dist(c, points[open[k]]) > eps) open[keep++] = open[k];
                open.resize(keep);
            }
            if (open.empty()) best = std::min(best, centers);
        }
        out.eps.push_back(eps);
        out.counts.push_back(best);
        if (best >= 2 && best < points.size()) {
            x.push_back(-std::log(eps));
            y.push_back(std::log(static_cast<double>(best)));
        }
    }
    if (!inside) throw InvalidInput("eps grid outside the data diameter");
    if (x.size() < 2) throw InvalidInput("eps grid resolves fewer than two covering scales");
    const stats::LineFit f = stats::least_squares(x, y);
    out.dimension = f.slope;
    out.slope_se = f.slope_se;
    return out;
}

BoxScales boxcount_scales(const IcrtSample& s, double l, const std::vector<LoopPoint>& cloud, Rng& rng) {
    if (!(s.level() > l)) throw InvalidInput("box-count scales need a sample beyond l");
    if (cloud.empty()) throw InvalidInput("box-count scales need a cloud");
    BoxScales out;
    const std::vector<LoopPoint> probes = sample_probes_beyond(s, l, 4000, rng);
    out.gap = probes.empty() ? 0.0 : hausdorff_gap(s, l, probes);
    for (const LoopPoint& p : cloud) out.radius = std::max(out.radius, loop_distance(s, cloud.front(), p));
    const double lo = std::max(2.0 * out.gap, out.radius / 64.0);
    for (double e = out.radius / 2.0; e >= lo * (1.0 - 1e-12); e /= std::pow(2.0, 0.25)) out.eps.push_back(e);
    if (out.eps.size() < 3) throw InvalidInput("truncation too coarse: fewer than 3 box-count scales");
    return out;
}

LocalMass local_mass_exponents(const IcrtSample& s, double l, const std::vector<LoopPoint>& centers,
                               const std::vector<double>& eps_grid,
                               const std::vector<LoopPoint>& cloud) {
    if (eps_grid.size() < 2) throw InvalidInput("local mass needs at least two eps values");
    for (std::size_t e = 0; e < eps_grid.size(); ++e)
        if (!(eps_grid[e] > 0.0)) throw InvalidInput("local mass needs positive eps", e);
    LocalMass out;
    for (const LoopPoint& c : centers) {
        if (c.x > l) throw InvalidInput("center outside the truncation");
        std::vector<double> d;
        d.reserve(cloud.size());
        for (const LoopPoint& p : cloud) d.push_back(loop_distance(s, c, p));
        std::sort(d.begin(), d.end());
        std::vector<double> x, y;
        std::size_t dropped = 0;
        for (double eps : eps_grid) {
            const auto inside = static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), eps) - d.begin());
            if (inside == 0) {
                ++dropped;
                continue;
            }
            x.push_back(std::log(eps));
            y.push_back(std::log(static_cast<double>(inside) / static_cast<double>(d.size())));
        }
        out.dropped.push_back(dropped);
        if (dropped > 0) out.flagged = true;
        if (x.size() < 2) {
            out.flagged = true;
            continue;
        }
        out.exponents.push_back(stats::least_squares(x, y).slope);
    }
    return out;
}

LocalMass local_mass_exponents(const IcrtSample& s, double l, const std::vector<LoopPoint>& centers,
                               const std::vector<double>& eps_grid, std::size_t cloud_size, Rng& rng) {
    std::vector<LoopPoint> cloud;
    if (s.mass_prefix(std::min(l, s.level())) > 0.0)
        for (std::size_t k = 0; k < cloud_size; ++k) cloud.push_back(sample_loop_point(s, l, rng));
    return local_mass_exponents(s, l, centers, eps_grid, cloud);
}

// ------------------------------------------------------ distributional tests

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < n; k = next++) {
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard<std::mutex> g(mu);
                    if (!err) err = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

namespace {

std::uint64_t trial_seed(std::uint64_t seed, const char* what) { return hash_combine(hash_name(what), seed); }

// Y_k: 0 for k = 0, else the end of branch k-1.
double leaf(const IcrtSample& s, std::size_t k) { return k == 0 ? 0.0 : s.skeleton().branch(k - 1).end; }

const char* corruption_name(Corruption c) {
    switch (c) {
        case Corruption::None: return "none";
        case Corruption::GlueAtRoot: return "glue_at_root";
        case Corruption::ConstantAngles: return "constant_angles";
    }
    return "none";
}

nlohmann::json base_details(const ThetaSpec& spec, SeedRange seeds, const ReportOptions& opt) {
    return {{"theta0", spec.theta0},
            {"atoms", spec.weights.size()},
            {"seed_first", seeds.first},
            {"seed_count", seeds.count},
            {"corruption", corruption_name(opt.corruption)}};
}

void need_seeds(SeedRange seeds, std::size_t n, const char* what) {
    if (seeds.count < n)
        throw InvalidInput(std::string(what) + " needs at least " + std::to_string(n) + " seeds");
}

}  // namespace

TestReport reroot_test(const ThetaSpec& spec, SeedRange seeds, std::size_t pair_budget,
                       const ReportOptions& opt) {
    need_seeds(seeds, 500, "reroot_test");
    if (pair_budget < 1) throw InvalidInput("reroot_test needs a pair budget >= 1");
    const std::size_t n = seeds.count;
    std::vector<double> pairs(n), rooted(n);
    parallel_for(n, opt.jobs, [&](std::size_t k) {
        const std::uint64_t seed = seeds.first + k;
        const IcrtSample a = sample_icrt(spec, trial_seed(seed, "reroot-pairs"),
                                         StopRule::with_branches(pair_budget), opt.corruption);
        Rng pick = Rng::substream(seed, "reroot-pick");
        const std::size_t i = pick.index(pair_budget + 1);
        std::size_t j = pick.index(pair_budget);
        if (j >= i) ++j;
        pairs[k] = loop_distance(a, {leaf(a, i), 0.0}, {leaf(a, j), 0.0});
        const IcrtSample b = sample_icrt(spec, trial_seed(seed, "reroot-root"), StopRule::with_branches(1),
                                         opt.corruption);
        rooted[k] = loop_distance(b, {0.0, 0.0}, {b.level(), 0.0});
    });
    const stats::KsResult ks = stats::ks_two_sample(pairs, rooted);
    TestReport r;
    r.name = "reroot";
    r.kind = "statistical";
    r.statistic = "ks_two_sample";
    r.value = ks.statistic;
    r.p_value = ks.p_value;
    r.passed = ks.p_value > 0.01;
    r.details = base_details(spec, seeds, opt);
    r.details["pair_budget"] = pair_budget;
    r.details["mean_pair"] = stats::summarize(pairs).mean;
    r.details["mean_rooted"] = stats::summarize(rooted).mean;
    return r;
}

LeafPairSample leaf_pair_samples(const ThetaSpec& spec, SeedRange seeds, std::size_t leaves,
                                 std::size_t i, std::size_t j, std::uint64_t salt,
                                 const ReportOptions& opt) {
    if (leaves < 3) throw InvalidInput("permutation test needs at least 3 tracked leaves");
    if (i >= leaves || j >= leaves) throw InvalidInput("leaf index outside the tracked leaves");
    LeafPairSample out;
    out.distances.resize(seeds.count);
    out.atom_on_path.resize(seeds.count);
    parallel_for(seeds.count, opt.jobs, [&](std::size_t k) {
        const std::uint64_t seed = hash_combine(trial_seed(seeds.first + k, "permutation"), salt);
        const IcrtSample s = sample_icrt(spec, seed, StopRule::with_branches(leaves - 1), opt.corruption);
        const double a = leaf(s, i), b = leaf(s, j);
        out.distances[k] = s.skeleton().distance(a, b);
        bool on = false;
        for_each_path_atom(s, {a, 0.0}, {b, 0.0}, [&](std::size_t atom, double, double) { on |= atom == 0; });
        out.atom_on_path[k] = on ? 1 : 0;
    });
    return out;
}

TestReport permutation_invariance_test(const ThetaSpec& spec, SeedRange seeds, std::size_t k,
                                       const ReportOptions& opt) {
    need_seeds(seeds, 500, "permutation_invariance_test");
    const LeafPairSample a = leaf_pair_samples(spec, seeds, k, 0, 1, 1, opt);
    const LeafPairSample b = leaf_pair_samples(spec, seeds, k, 1, 2, 2, opt);
    const stats::KsResult ks = stats::ks_two_sample(a.distances, b.distances);
    const auto hits = [](const std::vector<char>& v) {
        return static_cast<std::size_t>(std::count(v.begin(), v.end(), 1));
    };
    const double pp = stats::two_proportion_pvalue(hits(a.atom_on_path), seeds.count, hits(b.atom_on_path),
                                                   seeds.count);
    TestReport r;
    r.name = "permutation";
    r.kind = "statistical";
    r.statistic = "ks_two_sample+two_proportion";
    r.value = ks.statistic;
    r.p_value = std::min(1.0, 2.0 * std::min(ks.p_value, pp));
    r.passed = r.p_value > 0.01;
    r.details = base_details(spec, seeds, opt);
    r.details["leaves"] = k;
    r.details["pairs"] = {{0, 1}, {1, 2}};
    r.details["ks_p"] = ks.p_value;
    r.details["atom_rate_a"] = static_cast<double>(hits(a.atom_on_path)) / static_cast<double>(seeds.count);
    r.details["atom_rate_b"] = static_cast<double>(hits(b.atom_on_path)) / static_cast<double>(seeds.count);
    r.details["proportion_p"] = pp;
    return r;
}

TestReport polya_urn_test(const ThetaSpec& spec, SeedRange seeds, std::size_t a, std::size_t steps,
                          const ReportOptions& opt) {
    if (a < 1 || steps < 1) throw InvalidInput("urn test needs a >= 1 and steps >= 1");
    struct Seed {
        std::size_t hits = 0, obs = 0, non_binary = 0;
        double p = 0.0, var = 0.0;
        bool skipped = false;
    };
    std::vector<Seed> per(seeds.count);
    parallel_for(seeds.count, opt.jobs, [&](std::size_t k) {
        const std::uint64_t seed = seeds.first + k;
        const IcrtSample s = sample_icrt(spec, trial_seed(seed, "urn"), StopRule::with_branches(a + steps),
                                         opt.corruption);
        Rng rng = Rng::substream(seed, "urn-points");
        const double ya = leaf(s, a);
        LoopPoint al = sample_loop_point(s, ya, rng), be = sample_loop_point(s, ya, rng);
        const OrderOutcome o = compare(s, al, be);
        Seed& out = per[k];
        if (o == OrderOutcome::Equal) {
            out.skipped = true;
            return;
        }
        if (!precedes(o)) std::swap(al, be);
        MassIndex cur(s, ya);
        double d = cur.left(be) - cur.left(al);
        for (std::size_t i = a; i < a + steps; ++i) {
            const MassIndex nxt(s, leaf(s, i + 1));
            const double dn = nxt.left(be) - nxt.left(al);
            const double p = std::clamp(d / cur.total(), 0.0, 1.0);
            const double gain = nxt.total() - cur.total();
            const double inc = dn - d;
            const double tol = 1e-9 * std::max(1.0, nxt.total());
            const bool none = std::abs(inc) <= tol;
            const bool all = std::abs(inc - gain) <= tol;
            if (!none && !all) ++out.non_binary;
            // gain == 0 leaves the step uninformative.
            if (gain > tol) {
                ++out.obs;
                if (all) ++out.hits;
                out.p += p;
                out.var += p * (1.0 - p);
            }
            d = dn;
            cur = nxt;
        }
    });
    Seed tot;
    std::size_t skipped = 0;
    for (const Seed& x : per) {
        tot.hits += x.hits;
        tot.obs += x.obs;
        tot.non_binary += x.non_binary;
        tot.p += x.p;
        tot.var += x.var;
        skipped += x.skipped ? 1 : 0;
    }
    const double se = std::sqrt(tot.var);
    const double z = se > 0.0 ? (static_cast<double>(tot.hits) - tot.p) / se : 0.0;
    TestReport r;
    r.name = "urn";
    r.kind = "tolerance";
    r.statistic = "pooled_z";
    r.value = z;
    r.p_value = std::erfc(std::abs(z) / std::sqrt(2.0));
    r.passed = tot.non_binary == 0 && std::abs(z) <= 4.0 && tot.obs > 0;
    r.details = base_details(spec, seeds, opt);
    r.details["a"] = a;
    r.details["steps"] = steps;
    r.details["observed_steps"] = tot.obs;
    r.details["gains"] = tot.hits;
    r.details["expected_gains"] = tot.p;
    r.details["standard_error"] = se;
    r.details["non_binary_steps"] = tot.non_binary;
    r.details["skipped_seeds"] = skipped;
    return r;
}

TestReport uniformity_test(const ThetaSpec& spec, SeedRange seeds, std::size_t branches,
                           const ReportOptions& opt) {
    need_seeds(seeds, 100, "uniformity_test");
    if (branches < 1) throw InvalidInput("uniformity test needs at least one branch");
    std::vector<double> t(seeds.count);
    parallel_for(seeds.count, opt.jobs, [&](std::size_t k) {
        const std::uint64_t seed = seeds.first + k;
        const IcrtSample s = sample_icrt(spec, trial_seed(seed, "uniformity"), StopRule::with_branches(branches),
                                         opt.corruption);
        Rng rng = Rng::substream(seed, "uniformity-point");
        const MassIndex idx(s, s.level());
        t[k] = idx.left_fraction(sample_loop_point(s, s.level(), rng));
    });
    const stats::KsResult ks = stats::ks_one_sample(t, [](double v) { return std::clamp(v, 0.0, 1.0); });
    TestReport r;
    r.name = "uniformity";
    r.kind = "statistical";
    r.statistic = "ks_one_sample";
    r.value = ks.statistic;
    r.p_value = ks.p_value;
    r.passed = ks.p_value > 0.01;
    r.details = base_details(spec, seeds, opt);
    r.details["branches"] = branches;
    r.details["mean"] = stats::summarize(t).mean;
    return r;
}

TailExponents tail_exponents(const ThetaSpec& spec, SeedRange seeds, const std::vector<double>& eps_grid,
                             const ReportOptions& opt) {
    need_seeds(seeds, 10000, "tail_exponents");
    if (eps_grid.size() < 4) throw InvalidInput("tail exponents need at least 4 eps values");
    for (std::size_t e = 0; e < eps_grid.size(); ++e)
        if (!(eps_grid[e] > 0.0) || (e > 0 && !(eps_grid[e] > eps_grid[e - 1])))
            throw InvalidInput("eps grid must be positive and increasing", e);
    std::vector<double> d(seeds.count);
    parallel_for(seeds.count, opt.jobs, [&](std::size_t k) {
        const IcrtSample s = sample_icrt(spec, trial_seed(seeds.first + k, "tail"), StopRule::with_branches(1),
                                         opt.corruption);
        d[k] = loop_distance(s, {0.0, 0.0}, {s.level(), 0.0});
    });
    std::sort(d.begin(), d.end());
    TailExponents out;
    std::vector<double> x, y;
    for (double eps : eps_grid) {
        const auto below = static_cast<std::size_t>(std::lower_bound(d.begin(), d.end(), eps) - d.begin());
        const double p = static_cast<double>(below) / static_cast<double>(d.size());
        out.eps.push_back(eps);
        out.tail.push_back(p);
        if (below == 0) {
            out.flagged = true;
            continue;
        }
        x.push_back(std::log(eps));
        y.push_back(std::log(p));
    }
    if (x.size() < 4) throw InvalidInput("tail exponents: fewer than 4 nonempty cells");
    out.slope = stats::least_squares(x, y).slope;
    const std::size_t w = (x.size() + 1) / 2;
    out.lower = out.upper = out.slope;
    bool first = true;
    for (std::size_t i = 0; i + w <= x.size(); ++i) {
        const std::vector<double> wx(x.begin() + i, x.begin() + i + w), wy(y.begin() + i, y.begin() + i + w);
        const double sl = stats::least_squares(wx, wy).slope;
        out.lower = first ? sl : std::min(out.lower, sl);
        out.upper = first ? sl : std::max(out.upper, sl);
        first = false;
    }
    return out;
}

// ------------------------------------------------------------ concentration

double step_mean(StepLaw law) { return law == StepLaw::Exponential ? 1.0 : 0.0; }

double absolute_moment(StepLaw law, double kappa) {
    switch (law) {
        case StepLaw::Rademacher: return 1.0;
        case StepLaw::CenteredUniform: return 1.0 / (kappa + 1.0);  // uniform on [-1, 1]
        case StepLaw::CenteredExponential: {
            const double below = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                [&](double x) { return std::pow(1.0 - x, kappa) * std::exp(-x); }, 0.0, 1.0, 10, 1e-14);
            return below + std::exp(-1.0) * std::tgamma(kappa + 1.0);
        }
        case StepLaw::Exponential: return std::tgamma(kappa + 1.0);
    }
    return 0.0;
}

double concentration_constant(double kappa) {
    const double c = std::pow(2.0, kappa + 1.0) * std::pow(2.0 * kappa, kappa / 2.0);
    return 2.0 * std::pow(3.0, kappa) * c;
}

double concentration_v(const VariableSpec& v, double kappa) {
    return static_cast<double>(v.n) * std::pow(absolute_moment(v.law, kappa), 2.0 / kappa);
}

TestReport concentration_check(double kappa, const VariableSpec& v, const std::vector<double>& t_grid,
                               std::size_t trials, std::uint64_t seed) {
    if (!(kappa >= 4.0)) throw InvalidInput("concentration check needs kappa >= 4");
    if (step_mean(v.law) != 0.0) throw InvalidInput("concentration check rejects non-centered inputs");
    if (v.n == 0 || trials == 0) throw InvalidInput("concentration check needs n >= 1 and trials >= 1");
    if (t_grid.empty()) throw InvalidInput("concentration check needs a t grid");
    for (std::size_t i = 0; i < t_grid.size(); ++i)
        if (!(t_grid[i] > 0.0)) throw InvalidInput("t grid must be positive", i);

    const std::size_t n = v.n;
    const double V = concentration_v(v, kappa);
    const double C = concentration_constant(kappa);
    // Positions x_i: a fixed random order; only ranks matter for the sup norm.
    std::vector<std::size_t> rank(n);
    std::iota(rank.begin(), rank.end(), 0);
    Rng pos = Rng::substream(seed, "positions");
    for (std::size_t i = n; i > 1; --i) std::swap(rank[i - 1], rank[pos.index(i)]);

    Rng rng = Rng::substream(seed, "steps");
    auto draw = [&] {
        switch (v.law) {
            case StepLaw::Rademacher: return (rng.bits() >> 63) ? 1.0 : -1.0;
            case StepLaw::CenteredUniform: return 2.0 * rng.uniform01() - 1.0;
            case StepLaw::CenteredExponential: return rng.exponential(1.0) - 1.0;
            case StepLaw::Exponential: break;
        }
        return 0.0;
    };
    std::vector<double> sups(trials), at_rank(n);
    for (std::size_t tr = 0; tr < trials; ++tr) {
        std::fill(at_rank.begin(), at_rank.end(), 0.0);
        double sup = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            at_rank[rank[k]] = draw();
            // S_k(x) sums the steps with x_i >= x: suffix sums in rank order.
            double run = 0.0;
            for (std::size_t r = n; r-- > 0;) {
                run += at_rank[r];
                sup = std::max(sup, std::abs(run));
            }
        }
        sups[tr] = sup;
    }
    std::sort(sups.begin(), sups.end());

    TestReport r;
    r.name = "concentration";
    r.kind = "tolerance";
    r.statistic = "max_excess";
    r.passed = true;
    double worst = -1.0;
    nlohmann::json rows = nlohmann::json::array();
    for (double t : t_grid) {
        const auto above = static_cast<std::size_t>(sups.end() - std::upper_bound(sups.begin(), sups.end(), t));
        const double p = static_cast<double>(above) / static_cast<double>(trials);
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
        const double bound = C * std::pow(std::sqrt(V) / t, kappa);
        const double excess = p - (bound + 4.0 * se);
        worst = std::max(worst, excess);
        if (excess > 0.0) r.passed = false;
        rows.push_back({{"t", t}, {"empirical", p}, {"se", se}, {"bound", bound}});
    }
    r.value = worst;
    r.p_value = r.passed ? 1.0 : 0.0;
    const char* names[] = {"rademacher", "centered_uniform", "centered_exponential", "exponential"};
    r.details = {{"kappa", kappa},    {"law", names[static_cast<int>(v.law)]},
                 {"n", n},            {"trials", trials},
                 {"seed", seed},      {"V", V},
                 {"C_kappa", C},      {"grid", rows}};
    return r;
}

}  // namespace icrt
