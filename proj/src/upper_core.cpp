#include "gexpect/upper_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gexpect/errors.hpp"
#include "gexpect/rng.hpp"

namespace gx {

namespace {

void check_dims(const FiniteModel& m, const RandomVariable& x) {
    if (x.values.size() != m.n_points())
        throw InputError("random variable / model dimension mismatch");
}

double expectation_under(const std::vector<double>& mu, const std::vector<double>& vals) {
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += mu[i] * vals[i];
    return s;
}

}  // namespace

double upper_expectation(const FiniteModel& m, const RandomVariable& x) {
    check_dims(m, x);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& mu : m.measures) best = std::max(best, expectation_under(mu, x.values));
    return best;
}

std::size_t upper_expectation_witness(const FiniteModel& m, const RandomVariable& x) {
    check_dims(m, x);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < m.n_measures(); ++j) {
        const double e = expectation_under(m.measures[j], x.values);
        if (e > best) {
            best = e;
            arg = j;
        }
    }
    return arg;
}

double capacity(const FiniteModel& m, const std::vector<std::size_t>& a) {
    for (std::size_t i : a)
        if (i >= m.n_points()) throw InputError("event index out of range");
    double best = 0.0;
    for (const auto& mu : m.measures) {
        double p = 0.0;
        for (std::size_t i : a) p += mu[i];
        best = std::max(best, p);
    }
    return std::min(best, 1.0);
}

double capacity_labels(const FiniteModel& m, const std::vector<std::string>& labels) {
    std::vector<std::size_t> idx;
    idx.reserve(labels.size());
    for (const auto& l : labels) idx.push_back(m.index_of(l));
    return capacity(m, idx);
}

double tail_functional(const FiniteModel& m, const RandomVariable& x, double p,
                       double n, bool strict) {
    check_dims(m, x);
    if (n < 0.0) throw InputError("tail threshold must be >= 0");
    std::vector<double> f(m.n_points(), 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double ax = std::abs(x.values[i]);
        const bool in = strict ? (ax > n) : (ax >= n);
        if (in) f[i] = std::pow(ax, p);
    }
    return upper_expectation(m, RandomVariable{std::move(f)});
}

double scaled_capacity_decay(const FiniteModel& m, const RandomVariable& x, double n) {
    check_dims(m, x);
    std::vector<std::size_t> a;
    for (std::size_t i = 0; i < m.n_points(); ++i)
        if (std::abs(x.values[i]) >= n) a.push_back(i);
    return n * capacity(m, a);
}

MarkovCheck markov_bound_check(const FiniteModel& m, const RandomVariable& x,
                               double p, double alpha) {
    if (alpha <= 0.0 || p <= 0.0) throw InputError("markov_bound_check needs alpha, p > 0");
    check_dims(m, x);
    std::vector<std::size_t> a;
    std::vector<double> powed(m.n_points());
    for (std::size_t i = 0; i < m.n_points(); ++i) {
        const double ax = std::abs(x.values[i]);
        if (ax > alpha) a.push_back(i);
        powed[i] = std::pow(ax, p);
    }
    MarkovCheck r;
    r.lhs = capacity(m, a);
    r.rhs = upper_expectation(m, RandomVariable{std::move(powed)}) / std::pow(alpha, p);
    r.holds = r.lhs <= r.rhs + 1e-12;
    return r;
}

// ---- Choquet suite -------------------------------------------------------

namespace {
bool is_subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    for (std::size_t i : a)
        if (std::find(b.begin(), b.end(), i) == b.end()) return false;
    return true;
}
}  // namespace

ChoquetReport choquet_suite(const FiniteModel& m,
                            const std::vector<std::vector<std::size_t>>& events) {
    ChoquetReport rep;
    std::vector<double> caps;
    caps.reserve(events.size());
    for (const auto& a : events) caps.push_back(capacity(m, a));

    for (std::size_t i = 0; i < events.size(); ++i) {
        if (caps[i] < -1e-15 || caps[i] > 1.0 + 1e-15) {
            rep.range_ok = false;
            rep.failure_witness = "range at event " + std::to_string(i);
        }
    }
    for (std::size_t i = 0; i < events.size(); ++i)
        for (std::size_t j = 0; j < events.size(); ++j)
            if (i != j && is_subset(events[i], events[j]) && caps[i] > caps[j] + 1e-12) {
                rep.monotone_ok = false;
                rep.failure_witness = "monotonicity at events " + std::to_string(i) + "," +
                                      std::to_string(j);
            }
    // subadditivity over the whole list
    {
        std::vector<std::size_t> uni;
        double sum = 0.0;
        for (std::size_t i = 0; i < events.size(); ++i) {
            for (std::size_t p : events[i])
                if (std::find(uni.begin(), uni.end(), p) == uni.end()) uni.push_back(p);
            sum += caps[i];
        }
        if (!events.empty() && capacity(m, uni) > sum + 1e-12) {
            rep.subadditive_ok = false;
            rep.failure_witness = "subadditivity over the event union";
        }
    }
    // continuity from below along every increasing chain within the list order
    {
        std::vector<std::size_t> uni;
        double last = 0.0;
        bool chain = true;
        for (std::size_t i = 0; i < events.size(); ++i) {
            if (i > 0 && !is_subset(events[i - 1], events[i])) chain = false;
        }
        if (chain && !events.empty()) {
            for (std::size_t p : events.back()) uni.push_back(p);
            last = caps.back();
            if (std::abs(capacity(m, uni) - last) > 1e-12) {
                rep.continuity_ok = false;
                rep.failure_witness = "continuity from below";
            }
        }
    }
    return rep;
}

// ---- Borel-Cantelli ------------------------------------------------------

BorelCantelliReport borel_cantelli_check(const FiniteModel& m,
                                         const std::vector<std::vector<std::size_t>>& events,
                                         double cauchy_tol) {
    BorelCantelliReport rep;
    const std::size_t horizon = events.size();
    if (horizon < 4) throw InputError("borel_cantelli_check needs at least 4 events");

    std::vector<double> caps;
    caps.reserve(horizon);
    for (const auto& a : events) caps.push_back(capacity(m, a));
    rep.capacity_sum = std::accumulate(caps.begin(), caps.end(), 0.0);

    // numerically convergent: the last-quarter partial sum is already Cauchy-small
    double last_quarter = 0.0;
    for (std::size_t k = 3 * horizon / 4; k < horizon; ++k) last_quarter += caps[k];
    rep.tail_sum = last_quarter;
    rep.precondition_ok = last_quarter <= cauchy_tol;
    if (!rep.precondition_ok) return rep;  // divergence report, not an exception

    // c( intersect_{k} union_{n>=k} A_n ) over the horizon
    std::vector<char> in_limsup(m.n_points(), 1);
    for (std::size_t k = 0; k < horizon; ++k) {
        std::vector<char> in_union(m.n_points(), 0);
        for (std::size_t n = k; n < horizon; ++n)
            for (std::size_t p : events[n]) in_union[p] = 1;
        std::vector<std::size_t> inter;
        for (std::size_t p = 0; p < m.n_points(); ++p) {
            in_limsup[p] = in_limsup[p] && in_union[p];
            if (in_limsup[p]) inter.push_back(p);
        }
        rep.limsup_capacities.push_back(capacity(m, inter));
    }
    rep.final_limsup_capacity = rep.limsup_capacities.back();
    rep.pass = rep.final_limsup_capacity <= 10.0 * rep.tail_sum + 1e-15;
    return rep;
}

// ---- uniform integrability -----------------------------------------------

UniformIntegrabilityResult uniform_integrability_check(const FiniteModel& m,
                                                       const RandomVariable& x,
                                                       double epsilon,
                                                       std::uint64_t sample_seed) {
    if (epsilon <= 0.0) throw InputError("epsilon must be positive");
    check_dims(m, x);

    double max_abs = 0.0;
    for (double v : x.values) max_abs = std::max(max_abs, std::abs(v));
    // on a finite model the tail vanishes once N exceeds max|X|; X in L^1_b holds
    double threshold = 0.0;
    while (tail_functional(m, x, 1.0, threshold) > epsilon / 2.0) {
        threshold += 1.0;
        if (threshold > max_abs + 1.0)
            throw InputError("tail functional does not reach eps/2; X not in L^1_b proxy");
    }
    if (threshold == 0.0) threshold = 1.0;  // the bounded branch: delta = eps / (2 max bound)

    UniformIntegrabilityResult r;
    r.threshold = threshold;
    r.delta = epsilon / (2.0 * threshold);

    auto value_on = [&](const std::vector<std::size_t>& a) {
        std::vector<double> f(m.n_points(), 0.0);
        for (std::size_t i : a) f[i] = std::abs(x.values[i]);
        return upper_expectation(m, RandomVariable{std::move(f)});
    };

    r.verified = true;
    r.worst_value = 0.0;
    auto consider = [&](const std::vector<std::size_t>& a) {
        if (capacity(m, a) > r.delta) return;
        const double v = value_on(a);
        r.worst_value = std::max(r.worst_value, v);
        if (v > epsilon + 1e-12) r.verified = false;
    };

    const std::size_t n = m.n_points();
    if (n <= 20) {
        r.exhaustive = true;
        for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
            std::vector<std::size_t> a;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1ULL << i)) a.push_back(i);
            consider(a);
        }
    } else {
        // greedy worst event per measure: points by |X| descending until the
        // capacity budget is exhausted, plus random events
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(x.values[a]) > std::abs(x.values[b]);
        });
        for (std::size_t j = 0; j < m.n_measures(); ++j) {
            std::vector<std::size_t> a;
            for (std::size_t i : order) {
                a.push_back(i);
                if (capacity(m, a) > r.delta) {
                    a.pop_back();
                }
            }
            consider(a);
        }
        CounterRng rng(sample_seed, 0xA11CE);
        for (int trial = 0; trial < 10000; ++trial) {
            std::vector<std::size_t> a;
            for (std::size_t i = 0; i < n; ++i)
                if (rng.next_uniform() < 0.2) a.push_back(i);
            consider(a);
        }
    }
    return r;
}

// ---- monotone convergence ------------------------------------------------

MonotoneConvergenceReport monotone_convergence_check(const FiniteModel& m,
                                                     const std::vector<RandomVariable>& xs) {
    if (xs.empty()) throw InputError("empty sequence");
    for (const auto& x : xs) check_dims(m, x);

    // polar points have zero capacity under every measure
    std::vector<char> polar(m.n_points(), 1);
    for (const auto& mu : m.measures)
        for (std::size_t i = 0; i < mu.size(); ++i)
            if (mu[i] > 0.0) polar[i] = 0;

    for (std::size_t k = 0; k + 1 < xs.size(); ++k)
        for (std::size_t i = 0; i < m.n_points(); ++i)
            if (!polar[i] && xs[k + 1].values[i] > xs[k].values[i] + 1e-15)
                throw InputError("sequence not nonincreasing at index " + std::to_string(k + 1) +
                                 ", point " + m.labels[i]);

    MonotoneConvergenceReport rep;
    for (const auto& x : xs) rep.expectations.push_back(upper_expectation(m, x));
    for (std::size_t k = 0; k + 1 < rep.expectations.size(); ++k)
        if (rep.expectations[k + 1] > rep.expectations[k] + 1e-12) rep.sequence_monotone = false;
    rep.limit_expectation = upper_expectation(m, xs.back());
    rep.converged = std::abs(rep.expectations.back() - rep.limit_expectation) <= 1e-9;
    return rep;
}

// ---- quasi-continuity and membership -------------------------------------

bool quasi_continuous(const FiniteModel& m, const RandomVariable& x,
                      const PointMetric& metric, const QcParams& qc) {
    // witness pairs: metric-adjacent points whose variation exceeds the budget
    std::vector<std::pair<std::size_t, std::size_t>> witnesses;
    for (std::size_t i = 0; i < m.n_points(); ++i)
        for (std::size_t j = i + 1; j < m.n_points(); ++j) {
            const double d = metric(i, j);
            if (d > 0.0 && d < qc.delta_metric &&
                std::abs(x.values[i] - x.values[j]) > qc.lip_budget * d)
                witnesses.emplace_back(i, j);
        }
    if (witnesses.empty()) return true;

    std::vector<std::size_t> pts;
    for (auto [i, j] : witnesses) {
        if (std::find(pts.begin(), pts.end(), i) == pts.end()) pts.push_back(i);
        if (std::find(pts.begin(), pts.end(), j) == pts.end()) pts.push_back(j);
    }

    // minimum-capacity vertex cover of the witness pairs
    double best = std::numeric_limits<double>::infinity();
    if (pts.size() <= 20) {
        for (std::uint64_t mask = 0; mask < (1ULL << pts.size()); ++mask) {
            std::vector<std::size_t> cover;
            for (std::size_t b = 0; b < pts.size(); ++b)
                if (mask & (1ULL << b)) cover.push_back(pts[b]);
            bool covers = true;
            for (auto [i, j] : witnesses) {
                const bool hit = std::find(cover.begin(), cover.end(), i) != cover.end() ||
                                 std::find(cover.begin(), cover.end(), j) != cover.end();
                if (!hit) {
                    covers = false;
                    break;
                }
            }
            if (covers) best = std::min(best, capacity(m, cover));
        }
    } else {
        // greedy: cover each pair by its lower-capacity endpoint
        std::vector<std::size_t> cover;
        for (auto [i, j] : witnesses) {
            const bool hit = std::find(cover.begin(), cover.end(), i) != cover.end() ||
                             std::find(cover.begin(), cover.end(), j) != cover.end();
            if (hit) continue;
            const double ci = capacity(m, {i});
            const double cj = capacity(m, {j});
            cover.push_back(ci <= cj ? i : j);
        }
        best = capacity(m, cover);
    }
    return best < qc.epsilon;
}

MembershipReport membership_report_model(const FiniteModel& m, const RandomVariable& x,
                                         double p, const PointMetric* metric,
                                         const QcParams& qc, bool strict_tail) {
    if (p <= 0.0) throw InputError("p must be positive");
    check_dims(m, x);

    MembershipReport rep;
    rep.p = p;
    std::vector<double> powed(m.n_points());
    for (std::size_t i = 0; i < m.n_points(); ++i)
        powed[i] = std::pow(std::abs(x.values[i]), p);
    const double norm_pp = upper_expectation(m, RandomVariable{powed});
    rep.norm_p = std::pow(std::max(norm_pp, 0.0), 1.0 / p);
    rep.in_lp = std::isfinite(norm_pp);

    double max_abs = 0.0;
    for (double v : x.values) max_abs = std::max(max_abs, std::abs(v));
    for (double n = 1.0; n <= max_abs + 1.0; n *= 2.0)
        rep.tail_values.emplace_back(n, tail_functional(m, x, p, n, strict_tail));
    rep.in_lp_b = rep.tail_values.empty() || rep.tail_values.back().second <= 1e-9;
    const bool qc_ok = metric ? quasi_continuous(m, x, *metric, qc) : true;
    rep.in_lp_c = rep.in_lp_b && qc_ok;
    return rep;
}

MembershipReport membership_report(const ModelFamily& fam, double p,
                                   bool use_value_metric, const QcParams& qc,
                                   bool strict_tail) {
    if (p <= 0.0) throw InputError("p must be positive");
    std::vector<MembershipReport> partials;
    std::vector<bool> b_verdicts, c_verdicts;
    for (int n : fam.truncations) {
        const FiniteModel m = fam.model_at(n);
        const RandomVariable x = fam.canonical_x(m);
        // probe the tail at a threshold that grows with the truncation
        const double probe = n / 2.0;
        const double tail = tail_functional(m, x, p, probe, strict_tail);
        PointMetric vm = use_value_metric ? value_metric(m) : PointMetric{};
        const PointMetric* use = use_value_metric ? &vm : nullptr;
        MembershipReport r = membership_report_model(m, x, p, use, qc, strict_tail);
        r.in_lp_b = tail <= 1e-9;
        r.in_lp_c = r.in_lp_b && (use ? quasi_continuous(m, x, *use, qc) : true);
        partials.push_back(r);
        b_verdicts.push_back(r.in_lp_b);
        c_verdicts.push_back(r.in_lp_c);
    }
    MembershipReport rep = partials.back();
    rep.p = p;
    const std::size_t k = b_verdicts.size();
    rep.stabilized = k >= 3 && b_verdicts[k - 1] == b_verdicts[k - 2] &&
                     b_verdicts[k - 2] == b_verdicts[k - 3] &&
                     c_verdicts[k - 1] == c_verdicts[k - 2] &&
                     c_verdicts[k - 2] == c_verdicts[k - 3];
    return rep;
}

double family_upper_expectation(const ModelFamily& fam) {
    double enumerated = -std::numeric_limits<double>::infinity();
    std::vector<double> values;
    for (int n : fam.truncations) {
        const FiniteModel m = fam.model_at(n);
        values.push_back(upper_expectation(m, fam.canonical_x(m)));
    }
    for (double v : values) enumerated = std::max(enumerated, v);
    // the truncation only ever misses tail measures, whose expectations approach
    // the closed-form limit; the family sup is the max of both
    return std::max(enumerated, fam.limit_expectation);
}

}  // namespace gx
