#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gexpect/gfunction.hpp"

namespace gx {

using Payoff1Fn = std::function<double(double)>;

struct Grid1D {
    double x_min = -10.0;
    double x_max = 10.0;
    int nx = 201;
    double t_end = 1.0;
    int nt = 1;

    double h() const { return (x_max - x_min) / (nx - 1); }
    double dt() const { return t_end / nt; }
    double node(int i) const { return x_min + i * h(); }
};

// picks nt from the CFL bound dt <= cfl * h^2 / sigma_max^2
Grid1D make_grid(double x_min, double x_max, int nx, double t_end, double sigma_max,
                 double cfl = 0.9);

struct GridSolution {
    Grid1D grid;
    std::vector<double> values;            // u(t_end, .)
    std::vector<double> snapshot_taus;     // elapsed times, ascending, last == t_end
    std::vector<std::vector<double>> snapshots;
    std::string warning;                   // set when the generator is degenerate

    double value_at(double x) const;  // linear interpolation, clamped at the ends
    // discrete second difference of the snapshot closest to elapsed time tau,
    // at the node closest to x; drives the bang-bang policy
    double snapshot_second_difference(double tau, double x) const;
};

// explicit monotone scheme for du/dt = G(d2u/dx2), u(0,.) = phi.
// n_snapshots < 0 stores every step, 0 stores only the final slice.
GridSolution solve_gheat(const Payoff1Fn& phi, const Interval1D& theta, const Grid1D& grid,
                         int n_snapshots = 0);

struct GheatOptions {
    int nx = 2001;
    double cfl = 0.9;
    double width_mult = 8.0;     // domain half-width = width_mult * sigma_max * sqrt(t) + hint
    double support_hint = 10.0;
    int n_snapshots = 0;
};

// E[phi(x + sqrt(t) B_1)] on an auto-sized domain
double g_normal_expectation(const Payoff1Fn& phi, const Interval1D& theta, double t,
                            double x, const GheatOptions& opt = {});

struct MeanCertaintyReport {
    double mean_plus = 0.0;      // E[clamp(B_t)]
    double mean_minus = 0.0;     // E[-clamp(B_t)]
    double upper_variance = 0.0;  // E[min(B_t^2, K^2)]
    double lower_variance = 0.0;  // -E[-min(B_t^2, K^2)]
};

MeanCertaintyReport mean_certainty_checks(const Interval1D& theta, double t,
                                          const GheatOptions& opt = {});

struct ConvergenceRow {
    int nx = 0;
    double value = 0.0;
    double diff_from_prev = 0.0;  // NaN on the first row
};

std::vector<ConvergenceRow> convergence_study(const Payoff1Fn& phi, const Interval1D& theta,
                                              const Grid1D& base_grid, int refinements,
                                              double probe_x = 0.0);

// in-place evolution of a value slice; shared with the cylinder reduction
void gheat_evolve(std::vector<double>& u, double h, double duration, const Interval1D& theta,
                  double cfl);

}  // namespace gx
