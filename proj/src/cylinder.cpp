#include "gexpect/cylinder.hpp"

#include <algorithm>
#include <cmath>

#include "gexpect/errors.hpp"
#include "gexpect/gheat.hpp"

namespace gx {

void CylinderPayoff::validate() const {
    if (times.empty()) throw InputError("cylinder payoff needs at least one time");
    if (times.size() > 3) throw InputError("cylinder reduction supports at most 3 times");
    double prev = 0.0;
    for (double t : times) {
        if (!(t > prev)) throw InputError("times must be strictly increasing and positive");
        prev = t;
    }
    if (!payoff) throw InputError("cylinder payoff has no evaluator");
    if (!(lipschitz >= 0.0)) throw InputError("lipschitz constant must be >= 0");
}

namespace {

struct Axis {
    double w = 0.0;    // half-width, symmetric about 0
    double h = 0.0;
    int nx = 0;
    double node(int i) const { return -w + i * h; }
};

std::vector<Axis> make_axes(const CylinderPayoff& cp, const Interval1D& theta,
                            const CylinderResolution& res) {
    if (res.nx < 3 || res.nx % 2 == 0) throw ConfigError("cylinder nx must be odd and >= 3");
    std::vector<Axis> axes(cp.n());
    double prev_t = 0.0;
    for (std::size_t k = 0; k < cp.n(); ++k) {
        const double tau = cp.times[k] - prev_t;
        prev_t = cp.times[k];
        Axis a;
        a.nx = res.nx;
        a.w = res.width_mult * theta.sigma_max * std::sqrt(tau) + cp.support_hint;
        a.h = 2.0 * a.w / (a.nx - 1);
        axes[k] = a;
    }
    return axes;
}

}  // namespace

double evaluate_cylinder(const CylinderPayoff& cp, const Interval1D& theta,
                         const CylinderResolution& res) {
    cp.validate();
    validate_theta(ThetaSet{theta});
    const std::size_t n = cp.n();
    const auto axes = make_axes(cp, theta, res);

    // tensor of payoff values over the increment grids, axis n-1 fastest
    std::vector<std::size_t> stride(n);
    std::size_t total = 1;
    for (std::size_t k = n; k-- > 0;) {
        stride[k] = total;
        total *= axes[k].nx;
    }
    std::vector<double> tensor(total);
    std::vector<double> point(n);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (std::size_t k = 0; k < n; ++k) {
            point[k] = axes[k].node(static_cast<int>(rem / stride[k]));
            rem %= stride[k];
        }
        tensor[flat] = cp.payoff(point);
    }

    // integrate out the last coordinate, repeatedly
    std::vector<double> slice;
    for (std::size_t k = n; k-- > 0;) {
        const Axis& a = axes[k];
        const double tau = cp.times[k] - (k > 0 ? cp.times[k - 1] : 0.0);
        const std::size_t outer = tensor.size() / a.nx;
        const int center = (a.nx - 1) / 2;
        std::vector<double> reduced(outer);
        slice.resize(a.nx);
        for (std::size_t j = 0; j < outer; ++j) {
            std::copy_n(tensor.begin() + j * a.nx, a.nx, slice.begin());
            gheat_evolve(slice, a.h, tau, theta, res.cfl);
            reduced[j] = slice[center];
        }
        tensor = std::move(reduced);
    }
    return tensor[0];
}

DppCheck dpp_consistency_check(const CylinderPayoff& cp, const Interval1D& theta,
                               double split_time, const CylinderResolution& res) {
    cp.validate();
    if (!(split_time > 0.0) || split_time >= cp.times.back())
        throw InputError("split time must lie strictly inside (0, t_n)");
    for (double t : cp.times)
        if (std::abs(t - split_time) < 1e-12)
            throw InputError("split time coincides with an existing time");
    if (cp.n() >= 3) throw InputError("splitting a 3-time payoff exceeds the reduction limit");

    DppCheck out;
    out.direct = evaluate_cylinder(cp, theta, res);

    // insert the split time; the two sub-increments around it are summed back
    // into the original coordinate before evaluating the payoff
    CylinderPayoff split = cp;
    split.times.clear();
    std::size_t split_coord = 0;
    for (std::size_t k = 0; k < cp.n(); ++k) {
        if (split_time < cp.times[k] && split.times.size() == k) {
            split_coord = k;
            split.times.push_back(split_time);
        }
        split.times.push_back(cp.times[k]);
    }
    const auto inner = cp.payoff;
    const std::size_t n_orig = cp.n();
    split.payoff = [inner, split_coord, n_orig](std::span<const double> x) {
        std::vector<double> y(n_orig);
        std::size_t src = 0;
        for (std::size_t k = 0; k < n_orig; ++k) {
            y[k] = x[src++];
            if (k == split_coord) y[k] += x[src++];
        }
        return inner(y);
    };
    out.split = evaluate_cylinder(split, theta, res);

    // worst spatial/temporal resolution across both evaluations
    double h_max = 0.0;
    double prev_t = 0.0;
    for (double t : split.times) {
        const double tau = t - prev_t;
        prev_t = t;
        const double w = res.width_mult * theta.sigma_max * std::sqrt(tau) + cp.support_hint;
        h_max = std::max(h_max, 2.0 * w / (res.nx - 1));
    }
    const double dt_max = res.cfl * h_max * h_max / (theta.sigma_max * theta.sigma_max);
    out.tolerance = 3.0 * std::max(h_max, dt_max) * std::max(cp.lipschitz, 1.0);
    out.pass = std::abs(out.direct - out.split) <= out.tolerance;
    return out;
}

}  // namespace gx
