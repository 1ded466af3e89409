#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "gexpect/cylinder.hpp"
#include "gexpect/gheat.hpp"

namespace gx {

struct ConstantPolicy {
    double sigma = 1.0;
};

struct PiecewiseConstantPolicy {
    std::vector<double> breakpoints;  // increasing, interior switch times
    std::vector<double> sigmas;       // breakpoints.size() + 1 entries
};

// sigma_max wherever the discrete second difference of the reference solution
// is >= 0, else sigma_min; the slice at remaining time T - t drives the choice
struct BangBangPolicy {
    GridSolution reference;  // must carry snapshots over [0, horizon]
    double horizon = 1.0;
};

using ControlPolicy = std::variant<ConstantPolicy, PiecewiseConstantPolicy, BangBangPolicy>;

std::string policy_label(const ControlPolicy& policy);
void validate_policy(const ControlPolicy& policy, const Interval1D& theta, double horizon);

// volatility at (t, state); evaluated from the state at the start of each step
// so the discrete control stays adapted
double policy_sigma(const ControlPolicy& policy, const Interval1D& theta, double t,
                    double state);

struct SimConfig {
    std::size_t n_paths = 10000;
    double dt_sim = 1e-3;
    std::uint64_t seed = 1;
    bool antithetic = false;
};

// increments of the controlled path between consecutive payoff times
std::vector<std::vector<double>> simulate_paths(const ControlPolicy& policy,
                                                const Interval1D& theta,
                                                const std::vector<double>& times,
                                                const SimConfig& cfg);

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::string policy;
};

MCEstimate policy_value(const ControlPolicy& policy, const Interval1D& theta,
                        const CylinderPayoff& cp, const SimConfig& cfg);

struct LowerBoundResult {
    MCEstimate best;
    std::vector<MCEstimate> table;
};

// finite policy sets only certify lower bounds on the upper expectation
LowerBoundResult lower_bound_expectation(const std::vector<ControlPolicy>& policies,
                                         const Interval1D& theta, const CylinderPayoff& cp,
                                         const SimConfig& cfg);

struct BangBangResult {
    MCEstimate mc;
    double pde = 0.0;
    double gap = 0.0;  // mc.mean - pde
};

// single payoff time: solve the PDE with snapshots, simulate under the induced
// bang-bang control, report the gap
BangBangResult bang_bang_value(const CylinderPayoff& cp, const Interval1D& theta,
                               const SimConfig& cfg, const GheatOptions& pde_res = {});

struct MomentBoundResult {
    double estimate = 0.0;
    double bound = 0.0;  // 3 sigma_max^4 (t - s)^2
    bool holds = false;
};

MomentBoundResult moment_bound_check(const ControlPolicy& policy, const Interval1D& theta,
                                     double s, double t, const SimConfig& cfg);

// full path values on the dyadic grid with 2^level + 1 points over [0, horizon]
std::vector<double> simulate_path_values(const ControlPolicy& policy, const Interval1D& theta,
                                         int level, std::uint64_t seed, std::uint64_t stream,
                                         double horizon = 1.0);

}  // namespace gx
