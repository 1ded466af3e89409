#include "gexpect/finite_model.hpp"

#include <cmath>
#include <istream>
#include <json.hpp>

#include "gexpect/errors.hpp"
#include "gexpect/rng.hpp"

namespace gx {

std::size_t FiniteModel::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return i;
    throw InputError("unknown point label: " + label);
}

void FiniteModel::validate() const {
    const std::size_t n = labels.size();
    if (n == 0) throw InputError("model has no sample points");
    if (measures.empty()) throw InputError("model has no measures");
    if (point_values.size() != n) throw InputError("point_values length mismatch");
    for (std::size_t j = 0; j < measures.size(); ++j) {
        const auto& mu = measures[j];
        if (mu.size() != n) throw InputError("measure " + std::to_string(j) + " length mismatch");
        double sum = 0.0;
        for (double w : mu) {
            if (!(w >= 0.0)) throw InputError("negative weight in measure " + std::to_string(j));
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw InputError("measure " + std::to_string(j) + " does not sum to 1");
    }
}

RandomVariable RandomVariable::from_point_values(const FiniteModel& m) {
    return RandomVariable{m.point_values};
}

PointMetric discrete_metric() {
    return [](std::size_t i, std::size_t j) { return i == j ? 0.0 : 1.0; };
}

PointMetric value_metric(const FiniteModel& m) {
    auto vals = m.point_values;
    return [vals](std::size_t i, std::size_t j) { return std::abs(vals[i] - vals[j]); };
}

// ---- builders ------------------------------------------------------------

FiniteModel exm2(int n_max) {
    if (n_max < 2) throw InputError("exm2 needs n_max >= 2");
    FiniteModel m;
    for (int k = 1; k <= n_max; ++k) {
        m.labels.push_back(std::to_string(k));
        m.point_values.push_back(static_cast<double>(k));
    }
    // P_1 is the Dirac at 1; P_n splits mass between 1 and n
    {
        std::vector<double> mu(m.n_points(), 0.0);
        mu[0] = 1.0;
        m.measures.push_back(mu);
        m.measure_labels.push_back("P1");
    }
    for (int n = 2; n <= n_max; ++n) {
        std::vector<double> mu(m.n_points(), 0.0);
        mu[0] = 1.0 - 1.0 / n;
        mu[n - 1] = 1.0 / n;
        m.measures.push_back(mu);
        m.measure_labels.push_back("P" + std::to_string(n));
    }
    m.validate();
    return m;
}

FiniteModel exm3(int n_max) {
    if (n_max < 2) throw InputError("exm3 needs n_max >= 2");
    FiniteModel m;
    // points 1..n_max^2 so that every atom k*n (k <= n <= n_max) exists
    const int top = n_max * n_max;
    for (int k = 1; k <= top; ++k) {
        m.labels.push_back(std::to_string(k));
        m.point_values.push_back(static_cast<double>(k));
    }
    {
        std::vector<double> mu(m.n_points(), 0.0);
        mu[0] = 1.0;
        m.measures.push_back(mu);
        m.measure_labels.push_back("P1");
    }
    for (int n = 2; n <= n_max; ++n) {
        std::vector<double> mu(m.n_points(), 0.0);
        const double n3 = static_cast<double>(n) * n * n;
        mu[0] = 1.0 - 1.0 / (static_cast<double>(n) * n);
        for (int k = 1; k <= n; ++k) mu[k * n - 1] += 1.0 / n3;
        m.measures.push_back(mu);
        m.measure_labels.push_back("P" + std::to_string(n));
    }
    m.validate();
    return m;
}

FiniteModel exm1(int m_subdiv) {
    if (m_subdiv < 2) throw InputError("exm1 needs m_subdiv >= 2");
    FiniteModel m;
    for (int k = 0; k <= m_subdiv; ++k) {
        const double x = static_cast<double>(k) / m_subdiv;
        m.labels.push_back(std::to_string(k) + "/" + std::to_string(m_subdiv));
        m.point_values.push_back(x);
    }
    // every Dirac measure
    for (std::size_t i = 0; i < m.n_points(); ++i) {
        std::vector<double> mu(m.n_points(), 0.0);
        mu[i] = 1.0;
        m.measures.push_back(mu);
        m.measure_labels.push_back("delta_" + m.labels[i]);
    }
    m.validate();
    return m;
}

ModelFamily exm2_family() {
    ModelFamily f;
    f.name = "exm2";
    f.model_at = [](int n) { return exm2(n); };
    f.canonical_x = [](const FiniteModel& m) { return RandomVariable::from_point_values(m); };
    // E_{P_n}[X] = 2 - 1/n increases to 2; the sup over the full family is the limit
    f.limit_expectation = 2.0;
    return f;
}

ModelFamily exm3_family() {
    ModelFamily f;
    f.name = "exm3";
    f.model_at = [](int n) { return exm3(n); };
    f.canonical_x = [](const FiniteModel& m) { return RandomVariable::from_point_values(m); };
    // E_{P_n}[X] = 3/2 + 1/(2n) - 1/n^2 -> 3/2; the max 25/16 is attained at n = 4
    f.limit_expectation = 1.5;
    return f;
}

ModelFamily exm1_family() {
    ModelFamily f;
    f.name = "exm1";
    f.model_at = [](int m_subdiv) { return exm1(m_subdiv); };
    f.canonical_x = [](const FiniteModel& m) {
        // indicator of the interior point closest to 1/2
        RandomVariable x;
        x.values.assign(m.n_points(), 0.0);
        std::size_t best = 1;
        for (std::size_t i = 1; i + 1 < m.n_points(); ++i)
            if (std::abs(m.point_values[i] - 0.5) < std::abs(m.point_values[best] - 0.5)) best = i;
        x.values[best] = 1.0;
        return x;
    };
    f.limit_expectation = 1.0;  // some Dirac always sits on the charged point
    return f;
}

// ---- JSON ----------------------------------------------------------------

FiniteModel load_model_json(std::istream& in) {
    nlohmann::json j;
    in >> j;
    FiniteModel m;
    for (const auto& p : j.at("points")) m.labels.push_back(p.get<std::string>());
    if (j.contains("values")) {
        for (const auto& v : j.at("values")) m.point_values.push_back(v.get<double>());
    } else {
        m.point_values.assign(m.labels.size(), 0.0);
    }
    for (const auto& mu : j.at("measures"))
        m.measures.push_back(mu.get<std::vector<double>>());
    if (j.contains("measure_labels")) {
        for (const auto& l : j.at("measure_labels")) m.measure_labels.push_back(l.get<std::string>());
    } else {
        for (std::size_t i = 0; i < m.measures.size(); ++i)
            m.measure_labels.push_back("P" + std::to_string(i + 1));
    }
    m.validate();
    return m;
}

RandomVariable load_variable_json(std::istream& in, const std::string& name,
                                  const FiniteModel& m) {
    nlohmann::json j;
    in >> j;
    const auto& vars = j.at("variables");
    if (!vars.contains(name)) throw InputError("no variable named " + name);
    RandomVariable x{vars.at(name).get<std::vector<double>>()};
    if (x.values.size() != m.n_points()) throw InputError("variable length mismatch");
    return x;
}

// ---- random generators for property suites -------------------------------

FiniteModel random_model(CounterRng& rng, std::size_t max_points, std::size_t max_measures) {
    FiniteModel m;
    const std::size_t n = 2 + rng.next_below(max_points - 1);
    const std::size_t k = 1 + rng.next_below(max_measures);
    for (std::size_t i = 0; i < n; ++i) {
        m.labels.push_back("w" + std::to_string(i));
        m.point_values.push_back(rng.next_uniform(-10.0, 10.0));
    }
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> mu(n, 0.0);
        double sum = 0.0;
        for (auto& w : mu) {
            w = (rng.next_uniform() < 0.3) ? 0.0 : rng.next_uniform();
            sum += w;
        }
        if (sum == 0.0) {
            mu[rng.next_below(n)] = 1.0;
            sum = 1.0;
        }
        for (auto& w : mu) w /= sum;
        // push the fp residual onto the largest weight so the 1e-12 gate passes
        double s2 = 0.0;
        std::size_t imax = 0;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            s2 += mu[i];
            if (mu[i] > mu[imax]) imax = i;
        }
        mu[imax] += 1.0 - s2;
        m.measures.push_back(mu);
        m.measure_labels.push_back("P" + std::to_string(j + 1));
    }
    m.validate();
    return m;
}

RandomVariable random_variable(CounterRng& rng, const FiniteModel& m, double scale) {
    RandomVariable x;
    x.values.reserve(m.n_points());
    for (std::size_t i = 0; i < m.n_points(); ++i)
        x.values.push_back(rng.next_uniform(-scale, scale));
    return x;
}

}  // namespace gx
