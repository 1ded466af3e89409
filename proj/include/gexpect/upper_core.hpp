#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gexpect/finite_model.hpp"

namespace gx {

// ---- upper expectation and capacity --------------------------------------

double upper_expectation(const FiniteModel& m, const RandomVariable& x);

// lowest-index maximizing measure
std::size_t upper_expectation_witness(const FiniteModel& m, const RandomVariable& x);

// A is a set of point indices
double capacity(const FiniteModel& m, const std::vector<std::size_t>& a);
double capacity_labels(const FiniteModel& m, const std::vector<std::string>& labels);

// sup_P E_P[|X|^p 1_{|X|>n}]; strict=false switches the indicator to >=
double tail_functional(const FiniteModel& m, const RandomVariable& x, double p,
                       double n, bool strict = true);

// n * c({|X| >= n})
double scaled_capacity_decay(const FiniteModel& m, const RandomVariable& x, double n);

// ---- diagnostics ---------------------------------------------------------

struct MarkovCheck {
    double lhs = 0.0;   // c({|X| > alpha})
    double rhs = 0.0;   // E[|X|^p] / alpha^p
    bool holds = false;
};

MarkovCheck markov_bound_check(const FiniteModel& m, const RandomVariable& x,
                               double p, double alpha);

struct ChoquetReport {
    bool range_ok = true;
    bool monotone_ok = true;
    bool subadditive_ok = true;
    bool continuity_ok = true;
    std::string failure_witness;  // empty unless something failed
    bool all_ok() const { return range_ok && monotone_ok && subadditive_ok && continuity_ok; }
};

ChoquetReport choquet_suite(const FiniteModel& m,
                            const std::vector<std::vector<std::size_t>>& events);

struct BorelCantelliReport {
    bool precondition_ok = false;    // capacity series numerically convergent
    double capacity_sum = 0.0;
    double tail_sum = 0.0;           // tail of the series past the stabilized head
    std::vector<double> limsup_capacities;  // c(union_{n>=k} A_n) for k = 1..horizon
    double final_limsup_capacity = 0.0;
    bool pass = false;               // final limsup capacity <= 10 * tail_sum
};

// events[k] is A_{k+1}; horizon = events.size()
BorelCantelliReport borel_cantelli_check(const FiniteModel& m,
                                         const std::vector<std::vector<std::size_t>>& events,
                                         double cauchy_tol = 1e-2);

struct UniformIntegrabilityResult {
    double delta = 0.0;
    double threshold = 0.0;    // smallest N with tail <= eps/2
    bool verified = false;     // every tested event A with c(A) <= delta has E[|X| 1_A] <= eps
    double worst_value = 0.0;  // largest E[|X| 1_A] seen over admissible events
    bool exhaustive = false;   // full event enumeration vs greedy + sampled
};

UniformIntegrabilityResult uniform_integrability_check(const FiniteModel& m,
                                                       const RandomVariable& x,
                                                       double epsilon,
                                                       std::uint64_t sample_seed = 1);

struct MonotoneConvergenceReport {
    std::vector<double> expectations;
    bool sequence_monotone = true;    // the expectations are nonincreasing
    double limit_expectation = 0.0;   // E of the pointwise limit (last element)
    bool converged = true;            // last expectation within 1e-9 of limit_expectation
};

// throws InputError naming the violating index/point when the inputs are not
// pointwise nonincreasing outside the polar points
MonotoneConvergenceReport monotone_convergence_check(const FiniteModel& m,
                                                     const std::vector<RandomVariable>& xs);

// ---- membership ----------------------------------------------------------

struct MembershipReport {
    double p = 1.0;
    double norm_p = 0.0;
    bool in_lp = false;
    bool in_lp_b = false;
    bool in_lp_c = false;
    bool stabilized = true;  // verdict constant over the last three truncations
    std::vector<std::pair<double, double>> tail_values;  // (n, tail functional)
};

struct QcParams {
    double delta_metric = 0.5;  // only pairs closer than this can witness a discontinuity
    double lip_budget = 1.0;    // |dX| > lip_budget * distance flags a witness pair
    double epsilon = 0.5;       // capacity budget for the removable set
};

// quasi-continuity on a finite metric space: all discontinuity witnesses must be
// coverable by a point set of capacity < epsilon
bool quasi_continuous(const FiniteModel& m, const RandomVariable& x,
                      const PointMetric& metric, const QcParams& qc);

// use_value_metric builds |point_value_i - point_value_j| on each truncation;
// otherwise the discrete metric applies and quasi-continuity is automatic
MembershipReport membership_report(const ModelFamily& fam, double p,
                                   bool use_value_metric = false,
                                   const QcParams& qc = {},
                                   bool strict_tail = true);

// single-model helper used by the family report
MembershipReport membership_report_model(const FiniteModel& m, const RandomVariable& x,
                                         double p, const PointMetric* metric = nullptr,
                                         const QcParams& qc = {}, bool strict_tail = true);

// closed-form tail limit included: max over truncated measures and the family limit
double family_upper_expectation(const ModelFamily& fam);

}  // namespace gx
