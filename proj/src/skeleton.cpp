#include "icrt/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "icrt/error.hpp"

namespace icrt {

Skeleton Skeleton::build(const CutGlueSequence& seq) {
    const auto& y = seq.cuts;
    const auto& z = seq.glues;
    if (y.empty()) throw InvalidInput("skeleton needs at least one cut");
    if (z.size() + 1 != y.size())
        throw InvalidInput("expected " + std::to_string(y.size() - 1) + " glues, got " +
                           std::to_string(z.size()));
    if (!(y[0] > 0.0) || !std::isfinite(y[0])) throw InvalidInput("first cut must be positive", 0);
    for (std::size_t i = 1; i < y.size(); ++i) {
        if (!(y[i] > y[i - 1]) || !std::isfinite(y[i]))
            throw InvalidInput("cuts must be strictly increasing (cut " + std::to_string(i + 1) + ")",
                               i);
    }
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!(z[i] >= 0.0) || !(z[i] <= y[i]))
            throw InvalidInput("glue " + std::to_string(i + 1) + " must lie in [0, y_" +
                                   std::to_string(i + 1) + "]",
                               i);
    }

    Skeleton s;
    s.seq_ = seq;
    s.branches_.resize(y.size());
    s.children_.resize(y.size());
    s.branches_[0] = Branch{0.0, y[0], 0, 0.0, 0.0, 0};
    for (std::size_t b = 1; b < y.size(); ++b) {
        Branch& br = s.branches_[b];
        br.start = y[b - 1];
        br.end = y[b];
        br.glue = z[b - 1];
        br.parent = s.branch_of(br.glue);
        br.glue_depth = s.root_distance(br.glue);
        br.hops = s.branches_[br.parent].hops + 1;
        s.children_[br.parent].push_back(b);
    }
    for (auto& c : s.children_) {
        std::stable_sort(c.begin(), c.end(), [&](std::size_t a, std::size_t b) {
            return s.branches_[a].glue < s.branches_[b].glue;
        });
    }
    return s;
}

void Skeleton::check_point(double x) const {
    if (!(x >= 0.0) || !(x <= total_length()))
        throw OutOfRange("tree point " + std::to_string(x) + " outside [0, " +
                         std::to_string(total_length()) + "]");
}

std::size_t Skeleton::branch_of(double x) const {
    // Only branches already built are searched (used during build).
    const auto& y = seq_.cuts;
    const auto it = std::lower_bound(y.begin(), y.end(), x);
    if (!(x >= 0.0) || it == y.end())
        throw OutOfRange("tree point " + std::to_string(x) + " outside the skeleton");
    return static_cast<std::size_t>(it - y.begin());
}

double Skeleton::root_distance(double x) const {
    const std::size_t b = branch_of(x);
    const Branch& br = branches_[b];
    return br.glue_depth + (x - br.start);
}

std::vector<ChainStep> Skeleton::chain(double x) const {
    check_point(x);
    std::vector<ChainStep> out;
    std::size_t b = branch_of(x);
    out.push_back({b, x, ChainStep::npos});
    while (b != 0) {
        const Branch& br = branches_[b];
        out.push_back({br.parent, br.glue, b});
        b = br.parent;
    }
    return out;
}

double Skeleton::meet(double p, double q) const {
    check_point(p);
    check_point(q);
    std::size_t bp = branch_of(p), bq = branch_of(q);
    while (bp != bq) {
        if (bp > bq) {
            p = branches_[bp].glue;
            bp = branches_[bp].parent;
        } else {
            q = branches_[bq].glue;
            bq = branches_[bq].parent;
        }
    }
    return std::min(p, q);
}

double Skeleton::distance(double p, double q) const {
    if (p == q) {
        check_point(p);
        return 0.0;
    }
    const double m = meet(p, q);
    const double d = root_distance(p) + root_distance(q) - 2.0 * root_distance(m);
    return d < 0.0 ? 0.0 : d;
}

PathSummary Skeleton::path(double p, double q) const {
    const auto cp = chain(p);
    const auto cq = chain(q);
    std::size_t i = 0, j = 0;
    while (cp[i].branch != cq[j].branch) {
        if (cp[i].branch > cq[j].branch)
            ++i;
        else
            ++j;
    }
    PathSummary out;
    const std::size_t common = cp[i].branch;
    const double px = cp[i].pos, py = cq[j].pos;
    out.meet = std::min(px, py);
    for (std::size_t k = 0; k < i; ++k) {
        const Branch& br = branches_[cp[k].branch];
        out.segments.push_back({cp[k].branch, br.start, cp[k].pos, false, true});
    }
    bool meet_listed = false;
    if (px > out.meet) {
        out.segments.push_back({common, out.meet, px, true, true});
        meet_listed = true;
    }
    if (py > out.meet) out.segments.push_back({common, out.meet, py, !meet_listed, true});
    for (std::size_t k = j; k-- > 0;) {
        const Branch& br = branches_[cq[k].branch];
        out.segments.push_back({cq[k].branch, br.start, cq[k].pos, false, true});
    }
    for (const auto& s : out.segments) out.length += s.hi - s.lo;
    return out;
}

int Skeleton::branch_count_distance(double p, double q) const {
    check_point(p);
    check_point(q);
    std::size_t bp = branch_of(p), bq = branch_of(q);
    int count = 0;
    while (bp != bq) {
        if (bp > bq) {
            p = branches_[bp].glue;
            bp = branches_[bp].parent;
        } else {
            q = branches_[bq].glue;
            bq = branches_[bq].parent;
        }
        ++count;
    }
    if (p != q) ++count;
    return count;
}

double Skeleton::project(double p, double l) const {
    check_point(p);
    if (!(l >= 0.0) || !(l <= total_length()))
        throw OutOfRange("projection level " + std::to_string(l) + " outside the skeleton");
    while (p > l) {
        const std::size_t b = branch_of(p);
        if (b == 0 || branches_[b].start < l) return l;
        p = branches_[b].glue;
    }
    return p;
}

bool Skeleton::is_ancestor(double a, double x) const {
    check_point(a);
    const std::size_t ba = branch_of(a);
    check_point(x);
    std::size_t b = branch_of(x);
    while (b > ba) {
        x = branches_[b].glue;
        b = branches_[b].parent;
    }
    return b == ba && x >= a;
}

nlohmann::json Skeleton::to_json() const {
    return nlohmann::json{{"cuts", seq_.cuts}, {"glues", seq_.glues}};
}

Skeleton Skeleton::from_json(const nlohmann::json& j) {
    CutGlueSequence seq;
    seq.cuts = j.at("cuts").get<std::vector<double>>();
    seq.glues = j.at("glues").get<std::vector<double>>();
    return build(seq);
}

}  // namespace icrt
