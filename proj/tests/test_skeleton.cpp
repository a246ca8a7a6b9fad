#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "icrt/error.hpp"
#include "icrt/skeleton.hpp"
#include "icrt/suites.hpp"

using namespace icrt;

namespace {

// Weighted graph on the cut, glue and query coordinates; each branch is a chain of
// its coordinates and the start of branch b is identified with its glue.
struct GraphOracle {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj;
    std::map<std::pair<std::size_t, double>, std::size_t> node;

    std::size_t id(std::size_t b, double x) {
        auto [it, fresh] = node.try_emplace({b, x}, node.size());
        if (fresh) adj.emplace_back();
        return it->second;
    }

    GraphOracle(const CutGlueSequence& seq, const std::vector<double>& extra) {
        const auto& y = seq.cuts;
        auto branch = [&](double x) {
            return static_cast<std::size_t>(std::lower_bound(y.begin(), y.end(), x) - y.begin());
        };
        std::vector<std::vector<double>> on(y.size());
        for (std::size_t b = 0; b < y.size(); ++b) {
            on[b].push_back(b == 0 ? 0.0 : y[b - 1]);
            on[b].push_back(y[b]);
        }
        for (double z : seq.glues) on[branch(z)].push_back(z);
        for (double x : extra) on[branch(x)].push_back(x);
        for (std::size_t b = 0; b < y.size(); ++b) {
            auto& v = on[b];
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            for (std::size_t k = 0; k + 1 < v.size(); ++k) {
                const std::size_t i = id(b, v[k]), j = id(b, v[k + 1]);
                adj[i].push_back({j, v[k + 1] - v[k]});
                adj[j].push_back({i, v[k + 1] - v[k]});
            }
        }
        for (std::size_t b = 1; b < y.size(); ++b) {
            const double z = seq.glues[b - 1];
            const std::size_t i = id(branch(z), z), j = id(b, y[b - 1]);
            adj[i].push_back({j, 0.0});
            adj[j].push_back({i, 0.0});
        }
        ys = y;
    }

    // Shortest path length (Dijkstra).
    double dist(double p, double q) {
        const std::size_t s = id(bof(p), p), t = id(bof(q), q);
        std::vector<double> d(adj.size(), std::numeric_limits<double>::infinity());
        std::vector<char> done(adj.size(), 0);
        d[s] = 0.0;
        for (std::size_t it = 0; it < adj.size(); ++it) {
            std::size_t u = adj.size();
            for (std::size_t k = 0; k < adj.size(); ++k)
                if (!done[k] && (u == adj.size() || d[k] < d[u])) u = k;
            if (u == adj.size() || std::isinf(d[u])) break;
            done[u] = 1;
            for (auto [v, w] : adj[u]) d[v] = std::min(d[v], d[u] + w);
        }
        return d[t];
    }
    std::size_t bof(double x) const {
        return static_cast<std::size_t>(std::lower_bound(ys.begin(), ys.end(), x) - ys.begin());
    }
    std::vector<double> ys;
};

CutGlueSequence random_sequence(std::mt19937_64& g, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CutGlueSequence seq;
    double y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        y += 0.05 + u(g);
        seq.cuts.push_back(y);
        if (i + 1 < n) seq.glues.push_back(u(g) * y);
    }
    return seq;
}

}  // namespace

TEST_CASE("fixture skeleton values") {
    const IcrtSample fx = fixture_sample();
    const Skeleton& sk = fx.skeleton();
    CHECK(sk.branch_count() == 3);
    CHECK(sk.total_length() == doctest::Approx(3.0));
    CHECK(sk.distance(0.8, 2.5) == doctest::Approx(1.3));
    CHECK(sk.meet(0.8, 2.5) == doctest::Approx(0.5));
    CHECK(sk.project(2.5, 1.2) == doctest::Approx(1.2));
    CHECK(sk.project(2.5, 0.3) == doctest::Approx(0.3));
    CHECK(sk.branch(2).parent == 1);
    CHECK(sk.branch(1).parent == 0);
    CHECK(sk.root_distance(2.5) == doctest::Approx(1.5));
    // 0.8 and 2.5 are joined through branches 0, 1 and 2.
    CHECK(sk.branch_count_distance(2.5, 0.8) == 3);
    CHECK(sk.branch_count_distance(0.8, 0.8) == 0);
    CHECK(sk.is_ancestor(0.5, 2.5));
    CHECK_FALSE(sk.is_ancestor(0.8, 2.5));
}

TEST_CASE("invalid sequences are rejected") {
    CHECK_THROWS_AS(Skeleton::build({{}, {}}), InvalidInput);
    CHECK_THROWS_AS(Skeleton::build({{1.0, 0.5}, {0.2}}), InvalidInput);
    CHECK_THROWS_AS(Skeleton::build({{1.0, 2.0}, {1.5}}), InvalidInput);
    CHECK_THROWS_AS(Skeleton::build({{1.0, 2.0}, {}}), InvalidInput);
    CHECK_THROWS_AS(Skeleton::build({{0.0}, {}}), InvalidInput);
    const Skeleton sk = Skeleton::build({{1.0, 2.0}, {0.5}});
    CHECK_THROWS_AS(sk.distance(0.5, 2.5), OutOfRange);
    CHECK_THROWS_AS(sk.check_point(-0.1), OutOfRange);
}

TEST_CASE("glue at a cut endpoint and at the root") {
    const Skeleton sk = Skeleton::build({{1.0, 2.0, 3.0}, {1.0, 0.0}});
    CHECK(sk.distance(2.0, 3.0) == doctest::Approx(3.0));
    CHECK(sk.distance(1.5, 1.0) == doctest::Approx(0.5));
    CHECK(sk.meet(2.5, 0.7) == doctest::Approx(0.0));
}

TEST_CASE("distances agree with a shortest-path oracle") {
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 40; ++rep) {
        const CutGlueSequence seq = random_sequence(g, 1 + rep % 12);
        const Skeleton sk = Skeleton::build(seq);
        std::vector<double> q;
        for (int k = 0; k < 8; ++k) q.push_back(u(g) * sk.total_length());
        q.push_back(0.0);
        q.push_back(sk.total_length());
        GraphOracle oracle(seq, q);
        for (double p : q)
            for (double r : q) {
                const double d = sk.distance(p, r);
                CHECK(d == doctest::Approx(oracle.dist(p, r)).epsilon(1e-12));
                const double m = sk.meet(p, r);
                CHECK(sk.root_distance(p) + sk.root_distance(r) - 2 * sk.root_distance(m) ==
                      doctest::Approx(d).epsilon(1e-12));
                CHECK(sk.path(p, r).length == doctest::Approx(d).epsilon(1e-12));
                CHECK(sk.is_ancestor(m, p));
                CHECK(sk.is_ancestor(m, r));
            }
    }
}

TEST_CASE("path segments cover the geodesic") {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const Skeleton sk = Skeleton::build(random_sequence(g, 8));
        const double p = u(g) * sk.total_length(), q = u(g) * sk.total_length();
        const PathSummary ps = sk.path(p, q);
        double total = 0.0;
        for (const PathSegment& s : ps.segments) {
            CHECK(s.lo <= s.hi);
            total += s.hi - s.lo;
        }
        CHECK(total == doctest::Approx(ps.length).epsilon(1e-12));
        CHECK(ps.meet == doctest::Approx(sk.meet(p, q)));
    }
}

TEST_CASE("branch counting distance is a metric on branch points") {
    std::mt19937_64 g(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 30; ++rep) {
        const Skeleton sk = Skeleton::build(random_sequence(g, 10));
        std::vector<double> q;
        for (int k = 0; k < 6; ++k) q.push_back(u(g) * sk.total_length());
        for (double a : q)
            for (double b : q) {
                CHECK(sk.branch_count_distance(a, b) == sk.branch_count_distance(b, a));
                for (double c : q)
                    CHECK(sk.branch_count_distance(a, c) <=
                          sk.branch_count_distance(a, b) + sk.branch_count_distance(b, c));
            }
    }
}

TEST_CASE("projection onto a prefix") {
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 30; ++rep) {
        const Skeleton sk = Skeleton::build(random_sequence(g, 10));
        const double x = u(g) * sk.total_length(), l = u(g) * sk.total_length();
        const double p = sk.project(x, l);
        CHECK(p <= l);
        CHECK(sk.is_ancestor(p, x));
        CHECK(sk.project(p, l) == p);
        if (x <= l) CHECK(p == x);
        // Nearest point of the prefix: no prefix point on the root path of x is closer.
        for (const ChainStep& st : sk.chain(x))
            if (st.pos <= l) CHECK(sk.distance(x, st.pos) >= sk.distance(x, p) - 1e-12);
    }
}

TEST_CASE("json round trip") {
    const Skeleton sk = fixture_sample().skeleton();
    const Skeleton back = Skeleton::from_json(sk.to_json());
    CHECK(back.branch_count() == sk.branch_count());
    CHECK(back.distance(0.8, 2.5) == sk.distance(0.8, 2.5));
}
