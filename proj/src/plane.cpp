#include "icrt/plane.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "icrt/error.hpp"

namespace icrt {

namespace {

// Index range of a sorted vector strictly inside (lo, hi).
std::pair<std::size_t, std::size_t> open_range(const std::vector<double>& v, double lo, double hi) {
    const auto first = std::upper_bound(v.begin(), v.end(), lo);
    const auto last = std::lower_bound(first, v.end(), hi);
    return {static_cast<std::size_t>(first - v.begin()), static_cast<std::size_t>(last - v.begin())};
}

}  // namespace

char to_code(OrderOutcome o) {
    switch (o) {
        case OrderOutcome::LeftOf: return 'L';
        case OrderOutcome::FrontOf: return 'F';
        case OrderOutcome::BehindOf: return 'B';
        case OrderOutcome::RightOf: return 'R';
        case OrderOutcome::Equal: return 'E';
    }
    return '?';
}

void check_loop_point(const IcrtSample& s, const LoopPoint& a) {
    s.skeleton().check_point(a.x);
    if (!(a.u >= 0.0 && a.u <= 1.0))
        throw OutOfRange("angle " + std::to_string(a.u) + " outside [0,1]");
}

double angle_toward(const IcrtSample& s, double x, const LoopPoint& target) {
    const Skeleton& sk = s.skeleton();
    sk.check_point(x);
    check_loop_point(s, target);
    if (x == target.x) return target.u;
    const std::size_t bx = sk.branch_of(x);
    std::size_t b = sk.branch_of(target.x);
    double p = target.x;
    std::size_t from = ChainStep::npos;
    while (b > bx) {
        from = b;
        p = sk.branch(b).glue;
        b = sk.branch(b).parent;
    }
    if (b != bx || p < x) return 0.0;
    if (p > x) return s.continuing_angle(x);
    return s.glue_angle(from);
}

OrderOutcome compare(const IcrtSample& s, const LoopPoint& a, const LoopPoint& b) {
    check_loop_point(s, a);
    check_loop_point(s, b);
    const Skeleton& sk = s.skeleton();
    std::size_t ba = sk.branch_of(a.x), bb = sk.branch_of(b.x);
    double pa = a.x, pb = b.x;
    std::size_t fa = ChainStep::npos, fb = ChainStep::npos;
    while (ba != bb) {
        if (ba > bb) {
            fa = ba;
            pa = sk.branch(ba).glue;
            ba = sk.branch(ba).parent;
        } else {
            fb = bb;
            pb = sk.branch(bb).glue;
            bb = sk.branch(bb).parent;
        }
    }
    const double m = std::min(pa, pb);
    auto direction = [&](double p, std::size_t from, double own) {
        if (p != m) return s.continuing_angle(m);
        return from == ChainStep::npos ? own : s.glue_angle(from);
    };
    const double ua = direction(pa, fa, a.u);
    const double ub = direction(pb, fb, b.u);
    if (ua < ub) return OrderOutcome::LeftOf;
    if (ua > ub) return OrderOutcome::RightOf;
    const bool a_is_meet = fa == ChainStep::npos && pa == m;
    const bool b_is_meet = fb == ChainStep::npos && pb == m;
    if (a_is_meet && b_is_meet) return OrderOutcome::Equal;
    if (a_is_meet) return OrderOutcome::FrontOf;
    if (b_is_meet) return OrderOutcome::BehindOf;
    throw std::logic_error("angle function is not injective at the meet of the two points");
}

MassIndex::MassIndex(const IcrtSample& s, double l) : s_(&s), l_(l) {
    if (!(l > 0.0) || !(l <= s.level()))
        throw OutOfRange("mass index level " + std::to_string(l) + " outside (0, truncation]");
    const Skeleton& sk = s.skeleton();
    const MeasureState& m = s.measure();
    const double q = m.theta0_sq();
    const std::size_t n = sk.branch_count();
    total_ = m.mass_prefix(l);
    sub_.assign(n, 0.0);
    data_.resize(n);
    for (std::size_t b = n; b-- > 0;) {
        const Branch& br = sk.branch(b);
        BranchData& d = data_[b];
        d.atom_theta.push_back(0.0);
        d.atom_theta_u.push_back(0.0);
        for (std::size_t i : s.branch_atoms(b)) {
            if (m.x(i) > l) break;
            d.atom_x.push_back(m.x(i));
            d.atom_theta.push_back(d.atom_theta.back() + m.theta(i));
            d.atom_theta_u.push_back(d.atom_theta_u.back() + m.theta(i) * s.angles().atom[i]);
        }
        double own = 0.0;
        if (b == 0 || br.start < l) own = q * (std::min(br.end, l) - br.start) + d.atom_theta.back();
        d.child_all.push_back(0.0);
        d.child_left.push_back(0.0);
        d.child_right.push_back(0.0);
        for (std::size_t c : sk.children(b)) {
            const double g = sk.branch(c).glue;
            const double dir = s.continuing_angle(g);
            const double uc = s.glue_angle(c);
            d.child_glue.push_back(g);
            d.child_all.push_back(d.child_all.back() + sub_[c]);
            d.child_left.push_back(d.child_left.back() + (uc < dir ? sub_[c] : 0.0));
            d.child_right.push_back(d.child_right.back() + (uc > dir ? sub_[c] : 0.0));
        }
        sub_[b] = own + d.child_all.back();
    }
}

double MassIndex::beyond(std::size_t b, double p) const {
    const Branch& br = s_->skeleton().branch(b);
    const BranchData& d = data_[b];
    const double q = s_->theta0_sq();
    double mass = q * std::max(0.0, std::min(br.end, l_) - p);
    const auto ia = static_cast<std::size_t>(
        std::upper_bound(d.atom_x.begin(), d.atom_x.end(), p) - d.atom_x.begin());
    mass += d.atom_theta.back() - d.atom_theta[ia];
    const auto ic = static_cast<std::size_t>(
        std::upper_bound(d.child_glue.begin(), d.child_glue.end(), p) - d.child_glue.begin());
    mass += d.child_all.back() - d.child_all[ic];
    return mass;
}

MassSplit MassIndex::split(const LoopPoint& a) const {
    check_loop_point(*s_, a);
    if (a.x > l_) throw OutOfRange("loop point beyond the mass index level");
    const Skeleton& sk = s_->skeleton();
    const MeasureState& m = s_->measure();
    const double q = m.theta0_sq();
    const double neg_inf = -std::numeric_limits<double>::infinity();
    MassSplit out;
    bool first = true;
    for (const ChainStep& step : sk.chain(a.x)) {
        const std::size_t b = step.branch;
        const Branch& br = sk.branch(b);
        const BranchData& d = data_[b];
        const double p = step.pos;
        const double lo = b == 0 ? neg_inf : br.start;
        const double len = p - br.start;
        out.left += 0.5 * q * len;
        out.right += 0.5 * q * len;

        const auto [a0, a1] = open_range(d.atom_x, lo, p);
        const double th = d.atom_theta[a1] - d.atom_theta[a0];
        const double thu = d.atom_theta_u[a1] - d.atom_theta_u[a0];
        out.left += thu;
        out.right += th - thu;

        const auto [c0, c1] = open_range(d.child_glue, lo, p);
        out.left += d.child_left[c1] - d.child_left[c0];
        out.right += d.child_right[c1] - d.child_right[c0];

        const double dx = first ? a.u : s_->glue_angle(step.from);
        if (const auto atom = s_->atom_at(p)) {
            out.left += m.theta(*atom) * dx;
            out.right += m.theta(*atom) * (1.0 - dx);
        }
        auto classify = [&](double angle, double mass) {
            if (angle < dx)
                out.left += mass;
            else if (angle > dx)
                out.right += mass;
            else if (first)
                out.front += mass;
        };
        classify(s_->continuing_angle(p), beyond(b, p));
        const auto lo_c = std::lower_bound(d.child_glue.begin(), d.child_glue.end(), p);
        const auto hi_c = std::upper_bound(lo_c, d.child_glue.end(), p);
        for (auto it = lo_c; it != hi_c; ++it) {
            const std::size_t k = static_cast<std::size_t>(it - d.child_glue.begin());
            const std::size_t c = sk.children(b)[k];
            if (c == step.from) continue;
            classify(s_->glue_angle(c), sub_[c]);
        }
        first = false;
    }
    return out;
}

double MassIndex::left_fraction(const LoopPoint& a) const {
    if (!(total_ > 0.0)) throw InvalidInput("left fraction undefined: zero total mass");
    return std::clamp(left(a) / total_, 0.0, 1.0);
}

double MassIndex::lukasiewicz(const LoopPoint& a) const {
    check_loop_point(*s_, a);
    if (a.x > l_) throw OutOfRange("loop point beyond the mass index level");
    const Skeleton& sk = s_->skeleton();
    const MeasureState& m = s_->measure();
    double v = 0.5 * m.theta0_sq() * sk.root_distance(a.x);
    const double neg_inf = -std::numeric_limits<double>::infinity();
    bool first = true;
    for (const ChainStep& step : sk.chain(a.x)) {
        const BranchData& d = data_[step.branch];
        const double lo = step.branch == 0 ? neg_inf : sk.branch(step.branch).start;
        const auto [a0, a1] = open_range(d.atom_x, lo, step.pos);
        v += (d.atom_theta[a1] - d.atom_theta[a0]) - (d.atom_theta_u[a1] - d.atom_theta_u[a0]);
        if (const auto atom = s_->atom_at(step.pos)) {
            const double dx = first ? a.u : s_->glue_angle(step.from);
            v += m.theta(*atom) * (1.0 - dx);
        }
        first = false;
    }
    return v;
}

double left_mass(const IcrtSample& s, double l, const LoopPoint& a) { return MassIndex(s, l).left(a); }
double front_mass(const IcrtSample& s, double l, const LoopPoint& a) {
    return MassIndex(s, l).front(a);
}
double right_mass(const IcrtSample& s, double l, const LoopPoint& a) {
    return MassIndex(s, l).right(a);
}
double left_fraction(const IcrtSample& s, double l, const LoopPoint& a) {
    return MassIndex(s, l).left_fraction(a);
}

double lukasiewicz_value(const IcrtSample& s, const LoopPoint& a) {
    check_loop_point(s, a);
    const Skeleton& sk = s.skeleton();
    const MeasureState& m = s.measure();
    double v = 0.5 * m.theta0_sq() * sk.root_distance(a.x);
    for (const ChainStep& step : sk.chain(a.x)) {
        for (std::size_t i : s.branch_atoms(step.branch)) {
            const double xi = m.x(i);
            if (xi > step.pos) break;
            if (step.branch != 0 && xi <= sk.branch(step.branch).start) continue;
            v += m.theta(i) * (1.0 - angle_toward(s, xi, a));
        }
    }
    return v;
}

LoopPoint sample_loop_point(const IcrtSample& s, double l, Rng& rng) {
    const double x = sample_tree_point(s, l, rng);
    return LoopPoint{x, rng.uniform01()};
}

}  // namespace icrt
