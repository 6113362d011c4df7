#pragma once

#include "mobdyn/sphere_map.hpp"

#include <vector>

namespace mobdyn {

// max |g(r e^{i th})| / min |g(r e^{i th})| over at least 720 angles, with
// golden-section refinement around the sampled extrema. Throws
// std::domain_error when g moves 0 or infinity.
double circle_roundness(const SphereMap& g, double r, int angles = 720);

struct ConformalityVerdict {
    bool conformal = false;
    double defect = 0.0;
    // |g(t z_m)| / |g(t z_M)| for t = 2^-k, k = 1..20, with z_m and z_M the
    // least and most stretched unit directions of Dg(0).
    std::vector<double> ratios;
    double limit_ratio = 1.0;  // sigma_min / sigma_max of Dg(0)
    bool trend_agrees = false;
};

// Throws std::domain_error when g moves 0.
ConformalityVerdict conformality_at_origin_test(const SphereMap& g);

}  // namespace mobdyn
