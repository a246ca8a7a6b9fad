#include "icrt/loopmetric.hpp"

#include <algorithm>
#include <cmath>

#include "icrt/error.hpp"

namespace icrt {

namespace {

struct Walk {
    std::size_t branch;
    double pos;
    std::size_t from;
};

// Atoms of branch b with position in the open interval (lo, hi).
template <typename F>
void atoms_between(const IcrtSample& s, std::size_t b, double lo, double hi, F&& f) {
    const auto& ids = s.branch_atoms(b);
    const MeasureState& m = s.measure();
    auto it = std::upper_bound(ids.begin(), ids.end(), lo,
                               [&](double v, std::size_t i) { return v < m.x(i); });
    for (; it != ids.end() && m.x(*it) < hi; ++it) f(*it);
}

}  // namespace

void for_each_path_atom(const IcrtSample& s, const LoopPoint& a, const LoopPoint& b,
                        const std::function<void(std::size_t, double, double)>& fn) {
    check_loop_point(s, a);
    check_loop_point(s, b);
    const Skeleton& sk = s.skeleton();
    const auto ca = sk.chain(a.x);
    const auto cb = sk.chain(b.x);
    std::size_t i = 0, j = 0;
    while (ca[i].branch != cb[j].branch) {
        if (ca[i].branch > cb[j].branch)
            ++i;
        else
            ++j;
    }
    // Angle toward an endpoint at the top of one of its chain steps.
    auto top_angle = [&](const ChainStep& st, double own) {
        return st.from == ChainStep::npos ? own : s.glue_angle(st.from);
    };
    auto visit_atom_at = [&](double p, double ua, double ub) {
        if (const auto at = s.atom_at(p)) fn(*at, ua, ub);
    };
    const double lo_inf = -1.0;
    auto side = [&](const std::vector<ChainStep>& c, std::size_t upto, double own, bool is_a) {
        for (std::size_t k = 0; k < upto; ++k) {
            const std::size_t br = c[k].branch;
            const double lo = br == 0 ? lo_inf : sk.branch(br).start;
            atoms_between(s, br, lo, c[k].pos, [&](std::size_t at) {
                const double u = s.angles().atom[at];
                is_a ? fn(at, u, 0.0) : fn(at, 0.0, u);
            });
            const double t = top_angle(c[k], own);
            is_a ? visit_atom_at(c[k].pos, t, 0.0) : visit_atom_at(c[k].pos, 0.0, t);
        }
    };
    side(ca, i, a.u, true);
    side(cb, j, b.u, false);

    const std::size_t common = ca[i].branch;
    const double pa = ca[i].pos, pb = cb[j].pos;
    if (pa == pb) {
        visit_atom_at(pa, top_angle(ca[i], a.u), top_angle(cb[j], b.u));
    } else if (pa > pb) {
        atoms_between(s, common, pb, pa, [&](std::size_t at) { fn(at, s.angles().atom[at], 0.0); });
        visit_atom_at(pa, top_angle(ca[i], a.u), 0.0);
        visit_atom_at(pb, s.continuing_angle(pb), top_angle(cb[j], b.u));
    } else {
        atoms_between(s, common, pa, pb, [&](std::size_t at) { fn(at, 0.0, s.angles().atom[at]); });
        visit_atom_at(pb, 0.0, top_angle(cb[j], b.u));
        visit_atom_at(pa, top_angle(ca[i], a.u), s.continuing_angle(pa));
    }
}

double loop_distance(const IcrtSample& s, const LoopPoint& a, const LoopPoint& b) {
    double d = 0.25 * s.theta0_sq() * s.skeleton().distance(a.x, b.x);
    const MeasureState& m = s.measure();
    for_each_path_atom(s, a, b, [&](std::size_t i, double ua, double ub) {
        d += m.theta(i) * torus_distance(ua, ub);
    });
    return d;
}

double gff_distance(const IcrtSample& s, const LoopPoint& a, const LoopPoint& b) {
    double d = s.theta0_sq() / 6.0 * s.skeleton().distance(a.x, b.x);
    const MeasureState& m = s.measure();
    for_each_path_atom(s, a, b, [&](std::size_t i, double ua, double ub) {
        const double du = std::abs(ua - ub);
        d += m.theta(i) * du * (1.0 - du);
    });
    return d;
}

double path_mass(const IcrtSample& s, const LoopPoint& a, const LoopPoint& b) {
    double d = s.theta0_sq() * s.skeleton().distance(a.x, b.x);
    const MeasureState& m = s.measure();
    for_each_path_atom(s, a, b, [&](std::size_t i, double, double) { d += m.theta(i); });
    return d;
}

LoopPoint project_loop(const IcrtSample& s, const LoopPoint& a, double l) {
    check_loop_point(s, a);
    const double x = s.skeleton().project(a.x, l);
    if (x == a.x) return a;
    return LoopPoint{x, angle_toward(s, x, a)};
}

std::vector<LoopPoint> sample_probes_beyond(const IcrtSample& s, double l, std::size_t n, Rng& rng) {
    const MeasureState& m = s.measure();
    const double top = s.level();
    if (!(l >= 0.0 && l <= top)) throw OutOfRange("probe level outside the truncation");
    const double dens = m.theta0_sq() * (top - l);
    const std::size_t k0 = m.atoms_upto(l), k1 = m.atoms_upto(top);
    const double atoms = m.atom_mass_prefix(top) - m.atom_mass_prefix(l);
    std::vector<LoopPoint> out;
    if (!(dens + atoms > 0.0)) return out;
    out.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        const double v = rng.uniform01() * (dens + atoms);
        double x;
        if (v < dens) {
            x = l + v / m.theta0_sq();
            if (!(x > l)) x = std::nextafter(l, top);
            x = std::min(x, top);
        } else {
            const double w = m.atom_mass_prefix(l) + (v - dens);
            std::size_t at = m.atom_for_mass(w, k1);
            if (m.x(at) <= l) at = m.sorted()[k0];
            x = m.x(at);
        }
        out.push_back({x, rng.uniform01()});
    }
    return out;
}

double hausdorff_gap(const IcrtSample& s, double l, const std::vector<LoopPoint>& probes) {
    if (probes.empty()) throw InvalidInput("hausdorff_gap needs at least one probe");
    double g = 0.0;
    for (const auto& p : probes) g = std::max(g, loop_distance(s, p, project_loop(s, p, l)));
    return g;
}

}  // namespace icrt
