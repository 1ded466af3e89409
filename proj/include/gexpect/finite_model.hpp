#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace gx {

// A finite sample space together with a finite family of probability measures.
// Stands in for the abstract family of priors at desk scale.
struct FiniteModel {
    std::vector<std::string> labels;          // one per sample point
    std::vector<double> point_values;         // numeric value attached to each point
    std::vector<std::vector<double>> measures;  // each a probability vector over the points
    std::vector<std::string> measure_labels;

    std::size_t n_points() const { return labels.size(); }
    std::size_t n_measures() const { return measures.size(); }
    std::size_t index_of(const std::string& label) const;  // throws InputError

    // nonnegativity, normalization to 1e-12, consistent lengths
    void validate() const;
};

struct RandomVariable {
    std::vector<double> values;  // one per sample point

    static RandomVariable from_point_values(const FiniteModel& m);
};

// point-distance function over sample-point indices
using PointMetric = std::function<double(std::size_t, std::size_t)>;

PointMetric discrete_metric();
PointMetric value_metric(const FiniteModel& m);  // |point_value_i - point_value_j|

// Countable measure families truncated at a parameter N, together with the
// closed-form limit of the per-measure expectations of the canonical variable.
// Verdicts about the infinite family are taken as the stabilized limit over
// the listed truncations.
struct ModelFamily {
    std::string name;
    std::function<FiniteModel(int)> model_at;
    std::function<RandomVariable(const FiniteModel&)> canonical_x;
    double limit_expectation = 0.0;  // lim of E_{P_n}[X] over the tail of the family
    std::vector<int> truncations{8, 16, 32, 64};
};

// The paper-style counterexample builders.
FiniteModel exm2(int n_max);
FiniteModel exm3(int n_max);
FiniteModel exm1(int m_subdiv);  // dyadic [0,1] with all Dirac measures

ModelFamily exm2_family();
ModelFamily exm3_family();
ModelFamily exm1_family();

// JSON document: {"points": [...], "values": [...], "measures": [[...],...],
// "measure_labels": [...], "variables": {"X": [...]}}
FiniteModel load_model_json(std::istream& in);
RandomVariable load_variable_json(std::istream& in, const std::string& name,
                                  const FiniteModel& m);

FiniteModel random_model(class CounterRng& rng, std::size_t max_points = 8,
                         std::size_t max_measures = 6);
RandomVariable random_variable(class CounterRng& rng, const FiniteModel& m,
                               double scale = 10.0);

}  // namespace gx
