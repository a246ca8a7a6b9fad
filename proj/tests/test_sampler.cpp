#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "icrt/error.hpp"
#include "icrt/sampler.hpp"
#include "icrt/stats.hpp"
#include "icrt/suites.hpp"

using namespace icrt;

TEST_CASE("spec validation") {
    CHECK_NOTHROW(ThetaSpec::brownian().validate());
    CHECK_THROWS_AS((ThetaSpec{2.0, {}}.validate()), InvalidInput);
    CHECK_THROWS_AS((ThetaSpec{0.0, {0.5, 0.8}}.validate()), InvalidInput);
    CHECK_THROWS_AS((ThetaSpec{0.0, {1.0, -0.1}}.validate()), InvalidInput);
    CHECK_THROWS_AS(ThetaSpec::power_law(1.0, 10), InvalidInput);
    try {
        ThetaSpec{0.0, {0.6, 0.7}}.validate();
        FAIL("accepted increasing weights");
    } catch (const InvalidInput& e) {
        CHECK(e.index() == 1);
    }
    const ThetaSpec f = ThetaSpec::from_weights({0.6, 0.3});
    CHECK(f.theta0_sq() == doctest::Approx(0.55));
}

TEST_CASE("power-law weights are normalized and decreasing") {
    const ThetaSpec s = ThetaSpec::power_law(1.5, 1000, 0.2);
    double sq = s.theta0_sq();
    for (std::size_t i = 0; i < s.weights.size(); ++i) {
        sq += s.weights[i] * s.weights[i];
        if (i > 0) CHECK(s.weights[i] <= s.weights[i - 1]);
    }
    CHECK(sq == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.weights[7] / s.weights[0] == doctest::Approx(std::pow(8.0, -1.0 / 1.5)));
}

TEST_CASE("measure prefix and rate") {
    const IcrtSample fx = fixture_sample();
    CHECK(fx.mass_prefix(3.0) == doctest::Approx(2.55));
    CHECK(fx.mass_prefix(1.0) == doctest::Approx(0.55 + 0.6));
    CHECK(fx.mass_prefix(0.25) == doctest::Approx(0.55 * 0.25 + 0.6));
    CHECK(fx.mass_prefix(0.2499) == doctest::Approx(0.55 * 0.2499));
    // Lambda(l) = int_0^l mu[0,s] ds, by the trapezoid rule on a fine grid.
    const MeasureState& m = fx.measure();
    for (double l : {0.1, 0.9, 2.0, 3.0}) {
        const int n = 200000;
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += m.mass_prefix((k + 0.5) * l / n) * l / n;
        CHECK(cumulative_rate(m, l) == doctest::Approx(acc).epsilon(1e-6));
    }
}

TEST_CASE("expected mass matches Monte Carlo") {
    const ThetaSpec s = ThetaSpec::power_law(1.5, 50, 0.3);
    for (double l : {0.5, 4.0, 30.0}) {
        std::vector<double> v;
        for (std::uint64_t k = 0; k < 20000; ++k) {
            Rng rng = Rng::substream(k, "atoms");
            v.push_back(sample_atoms(s, rng).mass_prefix(l));
        }
        const stats::Summary sm = stats::summarize(v);
        CHECK(std::abs(sm.mean - expected_mass_prefix(s, l)) <= 4.0 * sm.se);
    }
    CHECK(expected_mass_prefix(ThetaSpec::brownian(), 7.0) == doctest::Approx(7.0));
}

TEST_CASE("first cut law for the Brownian tree") {
    // P(Y_1 > y) = exp(-y^2 / 2).
    std::vector<double> y1, ratio;
    for (std::uint64_t k = 1; k <= 3000; ++k) {
        const IcrtSample s = sample_icrt(ThetaSpec::brownian(), k, StopRule::with_branches(2));
        y1.push_back(s.cuts()[0]);
        ratio.push_back(s.glues()[0] / s.cuts()[0]);
    }
    CHECK(stats::ks_one_sample(y1, [](double y) { return 1.0 - std::exp(-0.5 * y * y); }).p_value > 1e-3);
    // Z_1 is uniform on [0, Y_1] under the Lebesgue part.
    CHECK(stats::ks_one_sample(ratio, [](double u) { return std::clamp(u, 0.0, 1.0); }).p_value > 1e-3);
}

TEST_CASE("glue hits an atom with its share of mass") {
    const MeasureState m(0.55, {0.25, 1.25}, {0.6, 0.3});
    const std::vector<double> cuts{1.0, 2.0};
    std::size_t at1 = 0, at2 = 0;
    const std::size_t n = 40000;
    for (std::uint64_t k = 0; k < n; ++k) {
        Rng rng(k);
        const std::vector<double> z = sample_glue(m, cuts, rng);
        REQUIRE(z.size() == 2);
        CHECK(z[0] <= 1.0);
        CHECK(z[1] <= 2.0);
        if (z[0] == 0.25) ++at1;
        if (z[0] == 1.25) ++at2;
    }
    // Z_1 ~ mu restricted to [0, Y_1 = 1], normalized; the atom at 1.25 is out of reach.
    const double p1 = 0.6 / (0.55 + 0.6);
    CHECK(std::abs(at1 / double(n) - p1) <= 4 * std::sqrt(p1 * (1 - p1) / n));
    CHECK(at2 == 0);
}

TEST_CASE("atom positions are exponential with rate theta") {
    const ThetaSpec s{0.0, {0.8, 0.6}};
    std::vector<double> x0, x1;
    for (std::uint64_t k = 0; k < 3000; ++k) {
        Rng rng(k + 17);
        const MeasureState m = sample_atoms(s, rng);
        x0.push_back(m.x(0));
        x1.push_back(m.x(1));
    }
    CHECK(stats::ks_one_sample(x0, [](double x) { return 1 - std::exp(-0.8 * x); }).p_value > 1e-3);
    CHECK(stats::ks_one_sample(x1, [](double x) { return 1 - std::exp(-0.6 * x); }).p_value > 1e-3);
}

TEST_CASE("stop rules and sample invariants") {
    for (const std::string& name : named_specs()) {
        const IcrtSample s = sample_icrt(named_spec(name), 42, StopRule::with_branches(20));
        CHECK(s.skeleton().branch_count() == 20);
        CHECK(s.level() == s.skeleton().total_length());
        CHECK_NOTHROW(s.audit());
        for (std::size_t i = 0; i + 1 < s.cuts().size(); ++i) CHECK(s.cuts()[i] < s.cuts()[i + 1]);
        for (std::size_t i = 0; i < s.glues().size(); ++i) CHECK(s.glues()[i] <= s.cuts()[i]);
        for (double u : s.angles().glue) CHECK((u >= 0.0 && u <= 1.0));

        const IcrtSample t = sample_icrt(named_spec(name), 42, StopRule::at_level(5.0));
        CHECK(t.level() == 5.0);
        for (double c : t.cuts()) CHECK(c < 5.0);
    }
}

TEST_CASE("sampling is deterministic and json round trips") {
    const ThetaSpec s = named_spec("powerlaw");
    const IcrtSample a = sample_icrt(s, 7, StopRule::at_level(6.0));
    const IcrtSample b = sample_icrt(s, 7, StopRule::at_level(6.0));
    CHECK(a.to_json().dump() == b.to_json().dump());
    const IcrtSample c = sample_icrt(s, 8, StopRule::at_level(6.0));
    CHECK(a.to_json().dump() != c.to_json().dump());
    const IcrtSample back = IcrtSample::from_json(a.to_json());
    CHECK(back.to_json().dump() == a.to_json().dump());
}

TEST_CASE("glue-at-root corruption glues everything to the root") {
    const IcrtSample s = sample_icrt(ThetaSpec::brownian(), 3, StopRule::with_branches(10), Corruption::GlueAtRoot);
    for (double z : s.glues()) CHECK(z == 0.0);
}

TEST_CASE("tree points stay inside the prefix") {
    const IcrtSample s = sample_icrt(named_spec("powerlaw"), 9, StopRule::at_level(10.0));
    Rng rng(1);
    for (int k = 0; k < 1000; ++k) {
        const double x = sample_tree_point(s, 4.0, rng);
        CHECK((x >= 0.0 && x <= 4.0));
    }
}
