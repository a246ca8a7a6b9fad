#include "icrt/contour.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "icrt/error.hpp"
#include "icrt/stats.hpp"

namespace icrt {

namespace {

HolderFit make_fit(const std::vector<double>& x, const std::vector<double>& y) {
    HolderFit f;
    f.lags = x.size();
    if (x.size() < 3) {
        f.degenerate = true;
        return f;
    }
    const stats::LineFit l = stats::least_squares(x, y);
    f.exponent = l.slope;
    f.stderr_ = l.slope_se;
    f.lower = l.slope - 2.0 * l.slope_se;
    f.upper = l.slope + 2.0 * l.slope_se;
    return f;
}

}  // namespace

ContourTable build_contour_table(const IcrtSample& s, double l, std::size_t resolution, Rng& rng) {
    ContourTable tab;
    tab.sample = &s;
    tab.level = l;
    tab.index = std::make_shared<const MassIndex>(s, l);
    const MassIndex& idx = *tab.index;
    if (!(idx.total() > 0.0)) throw InvalidInput("contour undefined: zero mass on [0, l]");
    tab.lipschitz = idx.total();
    const Skeleton& sk = s.skeleton();
    const MeasureState& m = s.measure();
    if (resolution == 0) resolution = 64 * sk.branch_count();
    tab.resolution = resolution;

    std::vector<LoopPoint> cand{{0.0, 0.0}, {0.0, 1.0}};
    for (std::size_t b = 0; b < sk.branch_count(); ++b) {
        const Branch& br = sk.branch(b);
        if (b > 0 && !(br.start < l)) continue;
        cand.push_back({std::min(br.end, l), 0.0});
        if (b > 0) cand.push_back({br.glue, s.glue_angle(b)});
    }
    for (std::size_t b = 0; b < sk.branch_count(); ++b)
        for (std::size_t i : s.branch_atoms(b)) {
            if (m.x(i) > l) break;
            if (m.theta(i) < 0.01) continue;
            for (int j = 0; j <= 64; ++j) cand.push_back({m.x(i), j / 64.0});
        }
    for (std::size_t r = 0; r < resolution; ++r) cand.push_back(sample_loop_point(s, l, rng));

    std::sort(cand.begin(), cand.end(), [&](const LoopPoint& a, const LoopPoint& b) {
        return precedes(compare(s, a, b));
    });
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    tab.entries.reserve(cand.size());
    for (const auto& c : cand) tab.entries.push_back({c, idx.left_fraction(c)});
    tab.entries.front().t = 0.0;
    tab.entries.back().t = 1.0;

    const double mu = tab.lipschitz;
    std::map<double, std::vector<std::size_t>> loops;
    for (std::size_t k = 0; k < tab.entries.size(); ++k)
        if (s.atom_at(tab.entries[k].point.x)) loops[tab.entries[k].point.x].push_back(k);
    for (const auto& [x, ks] : loops) {
        const double th = m.theta(*s.atom_at(x));
        for (std::size_t j = 0; j + 1 < ks.size(); ++j) {
            const auto& a = tab.entries[ks[j]];
            const auto& b = tab.entries[ks[j + 1]];
            if (!(b.t > a.t) || !(b.point.u > a.point.u)) continue;
            const double expect = th * (b.point.u - a.point.u);
            if (std::abs((b.t - a.t) * mu - expect) <= 1e-12 * std::max(1.0, mu))
                tab.arcs.push_back({a.t, b.t, x, a.point.u, b.point.u, th});
        }
    }
    std::sort(tab.arcs.begin(), tab.arcs.end(),
              [](const ContourTable::Arc& a, const ContourTable::Arc& b) { return a.t0 < b.t0; });
    // Largest gap between consecutive t values not covered by an arc.
    double gap = 0.0;
    std::size_t ai = 0;
    for (std::size_t k = 0; k + 1 < tab.entries.size(); ++k) {
        const double t0 = tab.entries[k].t, t1 = tab.entries[k + 1].t;
        while (ai < tab.arcs.size() && tab.arcs[ai].t1 <= t0) ++ai;
        const bool covered = ai < tab.arcs.size() && tab.arcs[ai].t0 <= t0 && t1 <= tab.arcs[ai].t1;
        if (!covered) gap = std::max(gap, t1 - t0);
    }
    tab.epsilon = mu * gap + 1e-9;
    return tab;
}

LoopPoint contour_eval(const ContourTable& table, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw OutOfRange("contour parameter outside [0,1]");
    const auto& e = table.entries;
    auto it = std::upper_bound(e.begin(), e.end(), t,
                               [](double v, const ContourEntry& c) { return v < c.t; });
    std::size_t k = static_cast<std::size_t>(it - e.begin()) - 1;
    const auto& arcs = table.arcs;
    auto ar = std::upper_bound(arcs.begin(), arcs.end(), t,
                               [](double v, const ContourTable::Arc& a) { return v < a.t0; });
    if (ar != arcs.begin()) {
        const auto& arc = *(ar - 1);
        if (t > arc.t0 && t < arc.t1) {
            const double u = arc.u0 + (t - arc.t0) * table.lipschitz / arc.theta;
            return {arc.x, std::clamp(u, arc.u0, arc.u1)};
        }
    }
    while (k > 0 && e[k - 1].t == e[k].t) --k;
    return e[k].point;
}

double snake_eval(const ContourTable& table, const FieldRealization& r, double t) {
    return r.fennec(contour_eval(table, t));
}

double height_eval(const ContourTable& table, double t) {
    return table.sample->skeleton().root_distance(contour_eval(table, t).x);
}

double lukasiewicz_eval(const ContourTable& table, double t) {
    return table.index->lukasiewicz(contour_eval(table, t));
}

std::size_t lipschitz_violations(const ContourTable& table, double slack) {
    std::size_t bad = 0;
    for (std::size_t k = 0; k + 1 < table.entries.size(); ++k) {
        const auto& a = table.entries[k];
        const auto& b = table.entries[k + 1];
        if (loop_distance(*table.sample, a.point, b.point) > table.lipschitz * (b.t - a.t) + slack) ++bad;
    }
    return bad;
}

double roundtrip_error(const ContourTable& table, const LoopPoint& a) {
    const LoopPoint c = contour_eval(table, table.index->left_fraction(a));
    return loop_distance(*table.sample, c, a);
}

HolderFit holder_estimate(const std::vector<double>& series) {
    if (series.size() < 1024) throw InvalidInput("holder_estimate needs at least 2^10 grid points");
    const std::size_t n = series.size();
    const double step = 1.0 / static_cast<double>(n - 1);
    std::vector<double> x, y;
    for (std::size_t h = 1; 4 * h <= n - 1; h *= 2) {
        double w = 0.0;
        for (std::size_t i = 0; i + h < n; ++i) w = std::max(w, std::abs(series[i + h] - series[i]));
        if (w > 0.0) {
            x.push_back(std::log(static_cast<double>(h) * step));
            y.push_back(std::log(w));
        }
    }
    return make_fit(x, y);
}

HolderFit metric_holder_estimate(const std::vector<double>& distances,
                                 const std::vector<double>& increments) {
    if (distances.size() != increments.size()) throw InvalidInput("distance/increment size mismatch");
    struct Bin {
        double d = 0.0, sq = 0.0;
        std::size_t n = 0;
    };
    std::map<int, Bin> bins;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        const double d = distances[i];
        if (!(d > 0.0)) continue;
        Bin& b = bins[static_cast<int>(std::floor(std::log2(d)))];
        b.d += d;
        b.sq += increments[i] * increments[i];
        ++b.n;
    }
    std::vector<double> x, y;
    for (const auto& [key, b] : bins) {
        if (b.n < 8 || !(b.sq > 0.0)) continue;
        x.push_back(std::log(b.d / static_cast<double>(b.n)));
        y.push_back(0.5 * std::log(b.sq / static_cast<double>(b.n)));
    }
    return make_fit(x, y);
}

std::vector<ProcessRow> sample_processes(const ContourTable& table, const FieldRealization& r,
                                         std::size_t grid) {
    if (grid < 1024) throw InvalidInput("process grid needs at least 2^10 points");
    std::vector<ProcessRow> rows;
    rows.reserve(grid);
    for (std::size_t j = 0; j < grid; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(grid - 1);
        const LoopPoint p = contour_eval(table, t);
        rows.push_back({t, table.sample->skeleton().root_distance(p.x), table.index->lukasiewicz(p),
                        r.fennec(p)});
    }
    return rows;
}

}  // namespace icrt
