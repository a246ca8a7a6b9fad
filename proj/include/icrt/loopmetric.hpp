#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "icrt/plane.hpp"

namespace icrt {

// Distance on the circle [0,1] with endpoints identified.
inline double torus_distance(double u, double v) {
    const double d = u > v ? u - v : v - u;
    return d < 1.0 - d ? d : 1.0 - d;
}

// Visits each atom of the closed geodesic between a.x and b.x with
// U_{X_i, a} and U_{X_i, b}.
void for_each_path_atom(const IcrtSample& s, const LoopPoint& a, const LoopPoint& b,
                        const std::function<void(std::size_t atom, double ua, double ub)>& fn);

double loop_distance(const IcrtSample& s, const LoopPoint& a, const LoopPoint& b);
double gff_distance(const IcrtSample& s, const LoopPoint& a, const LoopPoint& b);
double path_mass(const IcrtSample& s, const LoopPoint& a, const LoopPoint& b);
LoopPoint project_loop(const IcrtSample& s, const LoopPoint& a, double l);

// Draws from nu_L restricted to (l, level] x [0,1]; empty when that part has no mass.
std::vector<LoopPoint> sample_probes_beyond(const IcrtSample& s, double l, std::size_t n, Rng& rng);
double hausdorff_gap(const IcrtSample& s, double l, const std::vector<LoopPoint>& probes);

}  // namespace icrt
