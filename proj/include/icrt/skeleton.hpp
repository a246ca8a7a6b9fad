#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

namespace icrt {

// Cuts y_1 < ... < y_n and glues z_1..z_{n-1}, z_i <= y_i.
// Branch 0 is [0, y_1]; branch i >= 1 is (y_i, y_{i+1}] glued at z_i.
struct CutGlueSequence {
    std::vector<double> cuts;
    std::vector<double> glues;
};

struct Branch {
    double start = 0.0;  // exclusive for i >= 1
    double end = 0.0;
    std::size_t parent = 0;
    double glue = 0.0;
    double glue_depth = 0.0;  // d_T(0, glue)
    std::size_t hops = 0;     // number of branches strictly above the root branch on its root path
};

struct PathSegment {
    std::size_t branch;
    double lo;
    double hi;
    bool includes_lo;
    bool includes_hi;
};

struct PathSummary {
    std::vector<PathSegment> segments;  // ordered from p towards q
    double length = 0.0;
    double meet = 0.0;
};

// One step of the root path of a point: the point sits on `branch` at
// coordinate `pos`; `from` is the branch the walk arrived from (npos at the
// start point itself).
struct ChainStep {
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t branch;
    double pos;
    std::size_t from;
};

class Skeleton {
public:
    Skeleton() = default;
    static Skeleton build(const CutGlueSequence& seq);

    std::size_t branch_count() const { return branches_.size(); }
    const Branch& branch(std::size_t b) const { return branches_[b]; }
    const std::vector<Branch>& branches() const { return branches_; }
    double total_length() const { return branches_.empty() ? 0.0 : branches_.back().end; }
    const CutGlueSequence& sequence() const { return seq_; }

    // Children of b sorted by glue coordinate (ties by index).
    const std::vector<std::size_t>& children(std::size_t b) const { return children_[b]; }

    void check_point(double x) const;
    std::size_t branch_of(double x) const;
    double root_distance(double x) const;
    double distance(double p, double q) const;
    double meet(double p, double q) const;
    PathSummary path(double p, double q) const;
    int branch_count_distance(double p, double q) const;
    double project(double p, double l) const;
    // Root path of x as (branch, position, from) steps, x first.
    std::vector<ChainStep> chain(double x) const;
    // True iff a lies on the geodesic from the root to x.
    bool is_ancestor(double a, double x) const;

    nlohmann::json to_json() const;
    static Skeleton from_json(const nlohmann::json& j);

private:
    CutGlueSequence seq_;
    std::vector<Branch> branches_;
    std::vector<std::vector<std::size_t>> children_;
};

inline Skeleton build_skeleton(const CutGlueSequence& seq) { return Skeleton::build(seq); }
inline double tree_distance(const Skeleton& s, double p, double q) { return s.distance(p, q); }
inline double meet(const Skeleton& s, double p, double q) { return s.meet(p, q); }
inline PathSummary path(const Skeleton& s, double p, double q) { return s.path(p, q); }
inline int branch_count_distance(const Skeleton& s, double p, double q) {
    return s.branch_count_distance(p, q);
}
inline double project_to_prefix(const Skeleton& s, double p, double l) { return s.project(p, l); }

}  // namespace icrt
