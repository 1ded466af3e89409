#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gexpect/gfunction.hpp"

namespace gx {

using PayoffNFn = std::function<double(std::span<const double>)>;

// payoff of the first n Brownian increments at strictly increasing times
struct CylinderPayoff {
    std::vector<double> times;  // t_1 < ... < t_n, all positive
    PayoffNFn payoff;           // increment coordinates
    double lipschitz = 1.0;     // structural constant from the DSL certificate
    double support_hint = 10.0;

    std::size_t n() const { return times.size(); }
    void validate() const;  // throws InputError
};

struct CylinderResolution {
    int nx = 201;            // odd; shared across axes
    double cfl = 0.9;
    double width_mult = 8.0;
};

// backward reduction over increments: each coordinate is integrated out by a
// G-heat evolution over its duration, innermost first
double evaluate_cylinder(const CylinderPayoff& cp, const Interval1D& theta,
                         const CylinderResolution& res = {});

struct DppCheck {
    double direct = 0.0;
    double split = 0.0;
    double tolerance = 0.0;  // 3 * max(h, dt) * lipschitz
    bool pass = false;
};

// re-evaluates with an artificial intermediate time; the two routes must agree
DppCheck dpp_consistency_check(const CylinderPayoff& cp, const Interval1D& theta,
                               double split_time, const CylinderResolution& res = {});

}  // namespace gx
