#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "icrt/fields.hpp"

namespace icrt {

struct ContourEntry {
    LoopPoint point;
    double t = 0.0;
};

struct ContourTable {
    const IcrtSample* sample = nullptr;
    std::shared_ptr<const MassIndex> index;
    double level = 0.0;
    std::size_t resolution = 0;
    double lipschitz = 0.0;  // mu[0, l]
    double epsilon = 0.0;    // round-trip bound d_L(c(t(a)), a) <= epsilon
    std::vector<ContourEntry> entries;
    // Arcs of atom loops carrying no hanging mass, where t is affine in the angle.
    struct Arc {
        double t0, t1, x, u0, u1, theta;
    };
    std::vector<Arc> arcs;  // sorted by t0, disjoint
};

// `resolution` uniform draws from nu_L join the structural candidates; 0 picks 64 per branch.
ContourTable build_contour_table(const IcrtSample& s, double l, std::size_t resolution, Rng& rng);
LoopPoint contour_eval(const ContourTable& table, double t);
double snake_eval(const ContourTable& table, const FieldRealization& r, double t);
double height_eval(const ContourTable& table, double t);
double lukasiewicz_eval(const ContourTable& table, double t);

// Number of adjacent entries violating d_L <= mu[0,l] * dt + slack.
std::size_t lipschitz_violations(const ContourTable& table, double slack = 1e-9);
double roundtrip_error(const ContourTable& table, const LoopPoint& a);

struct HolderFit {
    double exponent = 0.0;
    double stderr_ = 0.0;
    double lower = 0.0;  // exponent -/+ 2 standard errors
    double upper = 0.0;
    std::size_t lags = 0;
    bool degenerate = false;
};

// Slope of log sup-modulus against log lag over dyadic lags; series on a uniform grid of [0,1].
HolderFit holder_estimate(const std::vector<double>& series);
// Slope of log RMS increment against log distance, pairs binned dyadically in distance.
HolderFit metric_holder_estimate(const std::vector<double>& distances,
                                 const std::vector<double>& increments);

struct ProcessRow {
    double t, height, lukasiewicz, snake;
};
std::vector<ProcessRow> sample_processes(const ContourTable& table, const FieldRealization& r,
                                         std::size_t grid);

}  // namespace icrt
