#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "icrt/sampler.hpp"

namespace icrt {

struct LoopPoint {
    double x = 0.0;
    double u = 0.0;
    bool operator==(const LoopPoint&) const = default;
};

// Position of alpha relative to beta.
// LeftOf: alpha is left of beta. FrontOf: beta is in front of alpha.
enum class OrderOutcome { LeftOf, FrontOf, BehindOf, RightOf, Equal };

char to_code(OrderOutcome o);
// alpha precedes beta in contour order.
inline bool precedes(OrderOutcome o) {
    return o == OrderOutcome::LeftOf || o == OrderOutcome::FrontOf;
}

void check_loop_point(const IcrtSample& s, const LoopPoint& a);

// u_{x, y, w}: angle at x of the direction containing the target.
double angle_toward(const IcrtSample& s, double x, const LoopPoint& target);

OrderOutcome compare(const IcrtSample& s, const LoopPoint& a, const LoopPoint& b);

struct MassSplit {
    double left = 0.0;
    double front = 0.0;
    double right = 0.0;
};

// Subtree aggregates of mu restricted to [0, l]; immutable once built.
class MassIndex {
public:
    MassIndex(const IcrtSample& s, double l);

    double level() const { return l_; }
    double total() const { return total_; }
    const IcrtSample& sample() const { return *s_; }

    MassSplit split(const LoopPoint& a) const;
    double left(const LoopPoint& a) const { return split(a).left; }
    double front(const LoopPoint& a) const { return split(a).front; }
    double right(const LoopPoint& a) const { return split(a).right; }
    double left_fraction(const LoopPoint& a) const;
    // mu of the subtree above branch b (branch included), within [0,l].
    double subtree(std::size_t b) const { return sub_[b]; }
    double lukasiewicz(const LoopPoint& a) const;

private:
    struct BranchData {
        std::vector<double> atom_x;       // atoms on the branch below l, sorted
        std::vector<double> atom_theta;   // prefix sums, size+1
        std::vector<double> atom_theta_u; // prefix sums of theta * U_X
        std::vector<double> child_glue;   // children sorted by glue
        std::vector<double> child_all;    // prefix sums of subtree masses
        std::vector<double> child_left;   // prefix sums, child angle < angle of continuing direction
        std::vector<double> child_right;  // prefix sums, child angle > angle of continuing direction
    };
    double beyond(std::size_t b, double p) const;

    const IcrtSample* s_;
    double l_;
    double total_;
    std::vector<double> sub_;
    std::vector<BranchData> data_;
};

double left_mass(const IcrtSample& s, double l, const LoopPoint& a);
double front_mass(const IcrtSample& s, double l, const LoopPoint& a);
double right_mass(const IcrtSample& s, double l, const LoopPoint& a);
double left_fraction(const IcrtSample& s, double l, const LoopPoint& a);
double lukasiewicz_value(const IcrtSample& s, const LoopPoint& a);

// Draw from nu_L restricted to [0,l] x [0,1].
LoopPoint sample_loop_point(const IcrtSample& s, double l, Rng& rng);

}  // namespace icrt
