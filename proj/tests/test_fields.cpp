#include <doctest.h>

#include <cmath>
#include <vector>

#include "icrt/error.hpp"
#include "icrt/fields.hpp"
#include "icrt/stats.hpp"
#include "icrt/suites.hpp"

using namespace icrt;

namespace {

// |mean(v) - target| within 4 standard errors of the sample of v.
void check_mean(const std::vector<double>& v, double target) {
    const stats::Summary s = stats::summarize(v);
    CHECK(std::abs(s.mean - target) <= 4.0 * s.se + 1e-12);
}

}  // namespace

TEST_CASE("bridge is pinned and deterministic") {
    CHECK(dyadic_bridge(1, 0.0, 2.0, 0.3, -1.0, 0.0) == 0.3);
    CHECK(dyadic_bridge(1, 0.0, 2.0, 0.3, -1.0, 2.0) == -1.0);
    CHECK(dyadic_bridge(9, 0.0, 1.0, 0.0, 0.0, 0.37) == dyadic_bridge(9, 0.0, 1.0, 0.0, 0.0, 0.37));
    CHECK(dyadic_bridge(9, 0.0, 1.0, 0.0, 0.0, 0.37) != dyadic_bridge(10, 0.0, 1.0, 0.0, 0.0, 0.37));
    CHECK(dyadic_motion(4, 3.0, 0.0) == 0.0);
}

TEST_CASE("bridge and motion covariances") {
    const std::size_t n = 20000;
    std::vector<double> b3, b37, cross, inc, m;
    for (std::uint64_t k = 0; k < n; ++k) {
        const double x = dyadic_bridge(k, 0.0, 1.0, 0.0, 0.0, 0.3);
        const double y = dyadic_bridge(k, 0.0, 1.0, 0.0, 0.0, 0.7);
        b3.push_back(x * x);
        cross.push_back(x * y);
        inc.push_back((y - x) * (y - x));
        const double w = dyadic_motion(k + n, 2.5, 1.1);
        m.push_back(w * w);
        b37.push_back(x);
    }
    check_mean(b37, 0.0);
    check_mean(b3, 0.3 * 0.7);
    check_mean(cross, 0.3 * 0.3);          // s (1 - t)
    check_mean(inc, 0.4 * 0.6);            // |u - v| (1 - |u - v|)
    check_mean(m, 1.1);
}

TEST_CASE("tree field and fennec increments match their distances") {
    const IcrtSample fx = fixture_sample();
    const LoopPoint a{0.8, 0.1}, b{2.5, 0.6}, c{0.25, 0.9};
    const std::size_t n = 20000;
    std::vector<double> t, f1, f2;
    for (std::uint64_t k = 0; k < n; ++k) {
        const FieldRealization r(fx, k);
        const double d = r.tree_field(0.8) - r.tree_field(2.5);
        t.push_back(d * d);
        const double e = r.fennec(a) - r.fennec(b);
        f1.push_back(e * e);
        const double g = r.fennec(a) - r.fennec(c);
        f2.push_back(g * g);
    }
    check_mean(t, fx.skeleton().distance(0.8, 2.5));
    check_mean(f1, gff_distance(fx, a, b));
    check_mean(f2, gff_distance(fx, a, c));
    const FieldRealization r(fx, 3);
    CHECK(r.tree_field(0.0) == 0.0);
    CHECK(r.fennec({0.0, 0.0}) == 0.0);
    CHECK(fennec_value(fx, r, a) == r.fennec(a));
    CHECK_THROWS_AS(r.bridge(0, 1.5), OutOfRange);
}

TEST_CASE("registry audits fields") {
    FieldRegistry reg;
    CHECK(reg.register_field(zero_field()).passed);
    CHECK(reg.register_field(rademacher_tent_field()).passed);
    CHECK(reg.register_field(bridge_field(), 2000).passed);
    CHECK(reg.contains("bridge"));
    CHECK_THROWS_AS(reg.get("missing"), InvalidInput);

    GeneralizedField biased;
    biased.name = "biased";
    biased.value = [](std::uint64_t, std::size_t, double u) { return u; };
    biased.sup_norm = [](std::uint64_t, std::size_t) { return 1.0; };
    CHECK_THROWS_AS(reg.register_field(biased), InvalidInput);

    GeneralizedField heavy = rademacher_tent_field();
    heavy.name = "heavy";
    heavy.sup_norm = [](std::uint64_t, std::size_t) { return 2.0; };
    CHECK_THROWS_AS(reg.register_field(heavy), InvalidInput);
}

TEST_CASE("bridge partial sums reproduce the fennec's loop part") {
    const IcrtSample s = sample_icrt(named_spec("powerlaw"), 6, StopRule::with_branches(30));
    FieldRegistry reg;
    reg.register_field(bridge_field(), 1000);
    reg.register_field(zero_field(), 100);
    Rng rng(1);
    for (int k = 0; k < 50; ++k) {
        const LoopPoint a = sample_loop_point(s, s.level(), rng);
        const FieldRealization r(s, 77);
        const double loops = r.fennec(a) - std::sqrt(s.theta0_sq() / 6.0) * r.tree_field(a.x);
        const double sum = generalized_partial_sum(s, reg, "bridge", 77, a, 1, s.measure().atom_count());
        CHECK(sum == doctest::Approx(loops).epsilon(1e-12));
        CHECK(generalized_partial_sum(s, reg, "zero", 77, a, 1, 1000) == 0.0);
    }
    const std::vector<LoopPoint> probes = atom_probes(s, 8);
    CHECK_FALSE(probes.empty());
    double prev = uniform_tail(s, reg, "bridge", 5, 1, probes);
    for (std::size_t N : {2, 5, 20, 100, 1000}) {
        const double t = uniform_tail(s, reg, "bridge", 5, N, probes);
        CHECK(t <= prev + 1e-12);
        prev = t;
    }
    CHECK_THROWS_AS(generalized_partial_sum(s, reg, "bridge", 1, {0.0, 0.0}, 5, 2), InvalidInput);
}
