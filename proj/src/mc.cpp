#include "gexpect/mc.hpp"

#include <algorithm>
#include <cmath>

#include "gexpect/errors.hpp"
#include "gexpect/rng.hpp"

namespace gx {

std::string policy_label(const ControlPolicy& policy) {
    struct V {
        std::string operator()(const ConstantPolicy& p) const {
            return "const:" + std::to_string(p.sigma);
        }
        std::string operator()(const PiecewiseConstantPolicy& p) const {
            return "piecewise[" + std::to_string(p.sigmas.size()) + "]";
        }
        std::string operator()(const BangBangPolicy&) const { return "bangbang"; }
    };
    return std::visit(V{}, policy);
}

void validate_policy(const ControlPolicy& policy, const Interval1D& theta, double horizon) {
    auto in_theta = [&](double s) {
        return s >= theta.sigma_min - 1e-12 && s <= theta.sigma_max + 1e-12;
    };
    if (const auto* c = std::get_if<ConstantPolicy>(&policy)) {
        if (!in_theta(c->sigma)) throw ConfigError("constant policy sigma outside Theta");
    } else if (const auto* pw = std::get_if<PiecewiseConstantPolicy>(&policy)) {
        if (pw->sigmas.size() != pw->breakpoints.size() + 1)
            throw ConfigError("piecewise policy needs breakpoints.size() + 1 sigmas");
        if (!std::is_sorted(pw->breakpoints.begin(), pw->breakpoints.end()))
            throw ConfigError("piecewise breakpoints must be increasing");
        for (double s : pw->sigmas)
            if (!in_theta(s)) throw ConfigError("piecewise policy sigma outside Theta");
    } else if (const auto* bb = std::get_if<BangBangPolicy>(&policy)) {
        if (bb->reference.snapshots.empty())
            throw ConfigError("bang-bang policy requires stored snapshots");
        if (bb->reference.snapshot_taus.back() < horizon - 1e-9)
            throw ConfigError("bang-bang snapshots do not cover the horizon");
    }
}

double policy_sigma(const ControlPolicy& policy, const Interval1D& theta, double t,
                    double state) {
    if (const auto* c = std::get_if<ConstantPolicy>(&policy)) return c->sigma;
    if (const auto* pw = std::get_if<PiecewiseConstantPolicy>(&policy)) {
        std::size_t k = std::upper_bound(pw->breakpoints.begin(), pw->breakpoints.end(), t) -
                        pw->breakpoints.begin();
        return pw->sigmas[k];
    }
    const auto& bb = std::get<BangBangPolicy>(policy);
    const double remaining = std::max(bb.horizon - t, 0.0);
    const double d2 = bb.reference.snapshot_second_difference(remaining, state);
    return d2 >= 0.0 ? theta.sigma_max : theta.sigma_min;
}

namespace {

void validate_sim(const SimConfig& cfg, const std::vector<double>& times) {
    if (cfg.n_paths == 0) throw ConfigError("n_paths must be >= 1");
    if (!(cfg.dt_sim > 0.0)) throw ConfigError("dt_sim must be > 0");
    double prev = 0.0;
    double min_tau = times.empty() ? 0.0 : times.front();
    for (double t : times) {
        if (!(t > prev)) throw InputError("payoff times must be strictly increasing, positive");
        min_tau = std::min(min_tau, t - prev);
        prev = t;
    }
    if (!times.empty() && cfg.dt_sim > min_tau / 10.0 + 1e-15)
        throw ConfigError("dt_sim must be <= smallest increment duration / 10");
}

}  // namespace

std::vector<std::vector<double>> simulate_paths(const ControlPolicy& policy,
                                                const Interval1D& theta,
                                                const std::vector<double>& times,
                                                const SimConfig& cfg) {
    validate_sim(cfg, times);
    validate_policy(policy, theta, times.empty() ? 0.0 : times.back());
    std::vector<std::vector<double>> out(cfg.n_paths);
    for (std::size_t j = 0; j < cfg.n_paths; ++j) {
        const std::uint64_t stream = cfg.antithetic ? j / 2 : j;
        const double sign = (cfg.antithetic && (j % 2 == 1)) ? -1.0 : 1.0;
        CounterRng rng(cfg.seed, stream);
        std::vector<double>& incs = out[j];
        incs.reserve(times.size());
        double state = 0.0;
        double t = 0.0;
        for (double target : times) {
            const double tau = target - t;
            const int steps = std::max(1, static_cast<int>(std::ceil(tau / cfg.dt_sim)));
            const double dt = tau / steps;
            const double sqdt = std::sqrt(dt);
            const double start = state;
            for (int m = 0; m < steps; ++m) {
                const double sigma = policy_sigma(policy, theta, t, state);
                state += sigma * sqdt * sign * rng.next_normal();
                t += dt;
            }
            t = target;
            incs.push_back(state - start);
        }
    }
    return out;
}

namespace {

MCEstimate estimate_from_values(std::vector<double>& vals, const std::string& label) {
    MCEstimate e;
    e.n_paths = vals.size();
    e.policy = label;
    e.mean = pairwise_sum(vals.data(), vals.size()) / static_cast<double>(vals.size());
    for (double& v : vals) {
        const double d = v - e.mean;
        v = d * d;
    }
    if (vals.size() > 1) {
        const double var = pairwise_sum(vals.data(), vals.size()) /
                           static_cast<double>(vals.size() - 1);
        e.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(vals.size()));
    }
    return e;
}

}  // namespace

MCEstimate policy_value(const ControlPolicy& policy, const Interval1D& theta,
                        const CylinderPayoff& cp, const SimConfig& cfg) {
    cp.validate();
    const auto paths = simulate_paths(policy, theta, cp.times, cfg);
    std::vector<double> vals(paths.size());
    for (std::size_t j = 0; j < paths.size(); ++j) vals[j] = cp.payoff(paths[j]);
    return estimate_from_values(vals, policy_label(policy));
}

LowerBoundResult lower_bound_expectation(const std::vector<ControlPolicy>& policies,
                                         const Interval1D& theta, const CylinderPayoff& cp,
                                         const SimConfig& cfg) {
    if (policies.empty()) throw InputError("policy set must be nonempty");
    LowerBoundResult r;
    for (const auto& p : policies) {
        r.table.push_back(policy_value(p, theta, cp, cfg));
        if (r.table.size() == 1 || r.table.back().mean > r.best.mean) r.best = r.table.back();
    }
    return r;
}

BangBangResult bang_bang_value(const CylinderPayoff& cp, const Interval1D& theta,
                               const SimConfig& cfg, const GheatOptions& pde_res) {
    cp.validate();
    if (cp.n() != 1) throw InputError("bang_bang_value needs a single payoff time");
    const double T = cp.times[0];
    const double w = pde_res.width_mult * theta.sigma_max * std::sqrt(T) + cp.support_hint;
    const Grid1D grid = make_grid(-w, w, pde_res.nx, T, theta.sigma_max, pde_res.cfl);
    const int snaps = pde_res.n_snapshots != 0 ? pde_res.n_snapshots : 256;
    auto phi = [&cp](double x) { return cp.payoff(std::span<const double>(&x, 1)); };
    GridSolution sol = solve_gheat(phi, theta, grid, snaps);

    BangBangResult r;
    r.pde = sol.value_at(0.0);
    BangBangPolicy bb;
    bb.reference = std::move(sol);
    bb.horizon = T;
    r.mc = policy_value(ControlPolicy{std::move(bb)}, theta, cp, cfg);
    r.gap = r.mc.mean - r.pde;
    return r;
}

MomentBoundResult moment_bound_check(const ControlPolicy& policy, const Interval1D& theta,
                                     double s, double t, const SimConfig& cfg) {
    if (s < 0.0 || t < s) throw InputError("need 0 <= s <= t");
    MomentBoundResult r;
    if (t == s) {
        r.holds = true;
        return r;
    }
    std::vector<double> times;
    if (s > 0.0) times.push_back(s);
    times.push_back(t);
    const auto paths = simulate_paths(policy, theta, times, cfg);
    std::vector<double> vals(paths.size());
    for (std::size_t j = 0; j < paths.size(); ++j) {
        const double d = paths[j].back();
        vals[j] = d * d * d * d;
    }
    const MCEstimate e = estimate_from_values(vals, policy_label(policy));
    r.estimate = e.mean;
    const double d4 = theta.sigma_max * theta.sigma_max * theta.sigma_max * theta.sigma_max;
    r.bound = 3.0 * d4 * (t - s) * (t - s);
    const double rel_se = e.mean > 0.0 ? e.std_error / e.mean : 0.0;
    r.holds = r.estimate <= r.bound * (1.0 + 4.0 * rel_se);
    return r;
}

std::vector<double> simulate_path_values(const ControlPolicy& policy, const Interval1D& theta,
                                         int level, std::uint64_t seed, std::uint64_t stream,
                                         double horizon) {
    if (level < 2) throw InputError("dyadic level must be >= 2");
    validate_policy(policy, theta, horizon);
    const std::size_t n = (std::size_t{1} << level) + 1;
    const double dt = horizon / static_cast<double>(n - 1);
    const double sqdt = std::sqrt(dt);
    std::vector<double> values(n);
    CounterRng rng(seed, stream);
    double state = 0.0;
    values[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double t = static_cast<double>(i - 1) * dt;
        const double sigma = policy_sigma(policy, theta, t, state);
        state += sigma * sqdt * rng.next_normal();
        values[i] = state;
    }
    return values;
}

}  // namespace gx
