#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "icrt/error.hpp"
#include "icrt/rng.hpp"
#include "icrt/stats.hpp"

using namespace icrt;

TEST_CASE("summary") {
    const stats::Summary s = stats::summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.variance == doctest::Approx(5.0 / 3.0));
    CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(s.n == 4);
}

TEST_CASE("kolmogorov tail") {
    CHECK(stats::kolmogorov_pvalue(0.0, 100) == doctest::Approx(1.0));
    // P(K > 1.358) ~ 0.05 for the limiting law.
    CHECK(stats::kolmogorov_pvalue(1.358 / std::sqrt(1e6), 1e6) == doctest::Approx(0.05).epsilon(0.02));
    CHECK(stats::kolmogorov_pvalue(0.5, 1000) < 1e-10);
}

TEST_CASE("ks tests detect shifts") {
    Rng rng(3);
    std::vector<double> u, v, w;
    for (int k = 0; k < 2000; ++k) {
        u.push_back(rng.uniform01());
        v.push_back(rng.uniform01());
        w.push_back(0.1 + rng.uniform01());
    }
    auto cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
    CHECK(stats::ks_one_sample(u, cdf).p_value > 1e-3);
    CHECK(stats::ks_one_sample(w, cdf).p_value < 1e-6);
    CHECK(stats::ks_two_sample(u, v).p_value > 1e-3);
    CHECK(stats::ks_two_sample(u, w).p_value < 1e-6);
    CHECK(stats::ks_two_sample(u, u).statistic == 0.0);
    const stats::KsResult r = stats::ks_two_sample({0.0, 1.0}, {2.0, 3.0});
    CHECK(r.statistic == doctest::Approx(1.0));
}

TEST_CASE("shapiro-francia") {
    Rng rng(8);
    std::vector<double> g, e;
    for (int k = 0; k < 2000; ++k) {
        g.push_back(rng.normal());
        e.push_back(rng.exponential(1.0));
    }
    const stats::NormalityResult a = stats::shapiro_francia(g);
    CHECK(a.p_value > 0.001);
    CHECK(a.statistic > 0.99);
    CHECK(stats::shapiro_francia(e).p_value < 1e-6);
    CHECK_THROWS_AS(stats::shapiro_francia({1.0, 2.0}), InvalidInput);
}

TEST_CASE("proportions and least squares") {
    CHECK(stats::two_proportion_pvalue(50, 100, 50, 100) == doctest::Approx(1.0));
    CHECK(stats::two_proportion_pvalue(10, 1000, 100, 1000) < 1e-10);
    const stats::LineFit f = stats::least_squares({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.slope_se == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("rng substreams are reproducible and distinct") {
    Rng a = Rng::substream(5, "x"), b = Rng::substream(5, "x"), c = Rng::substream(5, "y");
    const double va = a.uniform();
    CHECK(va == b.uniform());
    CHECK(va != c.uniform());
    CHECK(hashed_normal(12) == hashed_normal(12));
    Rng r(1);
    for (int k = 0; k < 1000; ++k) {
        const double u = r.uniform();
        CHECK((u > 0.0 && u <= 1.0));
        CHECK(r.index(7) < 7);
    }
}
