#include "gexpect/gheat.hpp"

#include <algorithm>
#include <cmath>

#include "gexpect/errors.hpp"

namespace gx {

Grid1D make_grid(double x_min, double x_max, int nx, double t_end, double sigma_max,
                 double cfl) {
    if (!(x_min < x_max)) throw ConfigError("grid requires x_min < x_max");
    if (nx < 3) throw ConfigError("grid requires nx >= 3");
    if (!(t_end > 0.0)) throw ConfigError("grid requires t_end > 0");
    if (!(cfl > 0.0) || cfl > 1.0) throw ConfigError("cfl factor must be in (0, 1]");
    Grid1D g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.nx = nx;
    g.t_end = t_end;
    const double h = g.h();
    const double dt_max = cfl * h * h / (sigma_max * sigma_max);
    g.nt = std::max(1, static_cast<int>(std::ceil(t_end / dt_max)));
    return g;
}

double GridSolution::value_at(double x) const {
    const double h = grid.h();
    if (x <= grid.x_min) return values.front();
    if (x >= grid.x_max) return values.back();
    const double s = (x - grid.x_min) / h;
    const int i = std::min(static_cast<int>(s), grid.nx - 2);
    const double w = s - i;
    return (1.0 - w) * values[i] + w * values[i + 1];
}

double GridSolution::snapshot_second_difference(double tau, double x) const {
    if (snapshots.empty()) throw ConfigError("solution stores no snapshots");
    // closest stored elapsed time
    std::size_t k = 0;
    double best = std::abs(snapshot_taus[0] - tau);
    for (std::size_t j = 1; j < snapshot_taus.size(); ++j) {
        const double d = std::abs(snapshot_taus[j] - tau);
        if (d < best) {
            best = d;
            k = j;
        }
    }
    const double h = grid.h();
    int i = static_cast<int>(std::lround((x - grid.x_min) / h));
    i = std::clamp(i, 1, grid.nx - 2);
    const auto& u = snapshots[k];
    return (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
}

void gheat_evolve(std::vector<double>& u, double h, double duration, const Interval1D& theta,
                  double cfl) {
    if (duration <= 0.0) return;
    const double s2max = theta.sigma_max * theta.sigma_max;
    const double s2min = theta.sigma_min * theta.sigma_min;
    const double dt_max = cfl * h * h / s2max;
    const int nt = std::max(1, static_cast<int>(std::ceil(duration / dt_max)));
    const double dt = duration / nt;
    const std::size_t n = u.size();
    std::vector<double> next(n);
    for (int m = 0; m < nt; ++m) {
        next.front() = u.front();  // boundary second difference held at zero
        next.back() = u.back();
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
            next[i] = u[i] + dt * 0.5 * (s2max * std::max(d2, 0.0) - s2min * std::max(-d2, 0.0));
        }
        u.swap(next);
    }
}

GridSolution solve_gheat(const Payoff1Fn& phi, const Interval1D& theta, const Grid1D& grid,
                         int n_snapshots) {
    validate_theta(ThetaSet{theta});
    const double h = grid.h();
    const double dt = grid.dt();
    const double s2max = theta.sigma_max * theta.sigma_max;
    const double s2min = theta.sigma_min * theta.sigma_min;
    if (dt > h * h / s2max * (1.0 + 1e-12))
        throw ConfigError("CFL violated: dt > h^2 / sigma_max^2");

    GridSolution sol;
    sol.grid = grid;
    if (theta.sigma_min == 0.0)
        sol.warning = "degenerate generator (sigma_min = 0): comparison still holds, "
                      "uniqueness constants are lost";

    std::vector<double> u(grid.nx);
    for (int i = 0; i < grid.nx; ++i) u[i] = phi(grid.node(i));

    const bool all = n_snapshots < 0;
    int snap_every = 0;
    if (all) {
        snap_every = 1;
    } else if (n_snapshots > 0) {
        snap_every = std::max(1, grid.nt / n_snapshots);
    }
    auto record = [&](int step) {
        sol.snapshot_taus.push_back(step * dt);
        sol.snapshots.push_back(u);
    };
    if (snap_every > 0) record(0);

    std::vector<double> next(grid.nx);
    for (int m = 1; m <= grid.nt; ++m) {
        next.front() = u.front();
        next.back() = u.back();
        for (int i = 1; i + 1 < grid.nx; ++i) {
            const double d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
            next[i] = u[i] + dt * 0.5 * (s2max * std::max(d2, 0.0) - s2min * std::max(-d2, 0.0));
        }
        u.swap(next);
        if ((m & 127) == 0 || m == grid.nt) {
            for (double v : u)
                if (!std::isfinite(v))
                    throw NumericalError("non-finite value at time step " + std::to_string(m));
        }
        if (snap_every > 0 && (m % snap_every == 0 || m == grid.nt)) record(m);
    }
    sol.values = std::move(u);
    if (snap_every > 0 &&
        std::abs(sol.snapshot_taus.back() - grid.t_end) > 1e-12 * std::max(1.0, grid.t_end))
        record(grid.nt);
    return sol;
}

double g_normal_expectation(const Payoff1Fn& phi, const Interval1D& theta, double t,
                            double x, const GheatOptions& opt) {
    if (t < 0.0) throw InputError("time must be >= 0");
    if (t == 0.0) return phi(x);
    const double w = opt.width_mult * theta.sigma_max * std::sqrt(t) + opt.support_hint;
    const Grid1D grid = make_grid(x - w, x + w, opt.nx, t, theta.sigma_max, opt.cfl);
    return solve_gheat(phi, theta, grid, opt.n_snapshots).value_at(x);
}

MeanCertaintyReport mean_certainty_checks(const Interval1D& theta, double t,
                                          const GheatOptions& opt) {
    MeanCertaintyReport r;
    if (t == 0.0) return r;
    const double k = opt.width_mult * theta.sigma_max * std::sqrt(t);
    auto clamp_k = [k](double y) { return std::clamp(y, -k, k); };
    auto sq_k = [k](double y) { return std::min(y * y, k * k); };
    GheatOptions o = opt;
    o.support_hint = k;
    r.mean_plus = g_normal_expectation(clamp_k, theta, t, 0.0, o);
    r.mean_minus = g_normal_expectation([&](double y) { return -clamp_k(y); }, theta, t, 0.0, o);
    r.upper_variance = g_normal_expectation(sq_k, theta, t, 0.0, o);
    r.lower_variance = -g_normal_expectation([&](double y) { return -sq_k(y); }, theta, t, 0.0, o);
    return r;
}

std::vector<ConvergenceRow> convergence_study(const Payoff1Fn& phi, const Interval1D& theta,
                                              const Grid1D& base_grid, int refinements,
                                              double probe_x) {
    std::vector<ConvergenceRow> rows;
    int nx = base_grid.nx;
    double prev = 0.0;
    for (int r = 0; r <= refinements; ++r) {
        const Grid1D g = make_grid(base_grid.x_min, base_grid.x_max, nx, base_grid.t_end,
                                   theta.sigma_max);
        const GridSolution sol = solve_gheat(phi, theta, g);
        ConvergenceRow row;
        row.nx = nx;
        row.value = sol.value_at(probe_x);
        row.diff_from_prev = rows.empty() ? std::nan("") : std::abs(row.value - prev);
        prev = row.value;
        rows.push_back(row);
        nx = 2 * nx - 1;  // halve h
    }
    return rows;
}

}  // namespace gx
