#include "gexpect/holder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gexpect/errors.hpp"

namespace gx {

void SampledPath::validate() const {
    if (level < 2) throw InputError("dyadic level must be >= 2");
    const std::size_t expect = (std::size_t{1} << level) + 1;
    if (values.size() != expect)
        throw InputError("path needs 2^level + 1 samples");
    for (double v : values)
        if (!std::isfinite(v)) throw InputError("path contains non-finite values");
}

SampledPath SampledPath::coarsen(int drop) const {
    validate();
    if (drop < 0 || level - drop < 2) throw InputError("cannot coarsen below level 2");
    SampledPath out;
    out.level = level - drop;
    const std::size_t step = std::size_t{1} << drop;
    for (std::size_t i = 0; i < values.size(); i += step) out.values.push_back(values[i]);
    return out;
}

namespace {

constexpr int kExactLevelCap = 12;

// m[d] = max_i |X_{i+d} - X_i|
std::vector<double> lag_maxima(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> m(n, 0.0);
    for (std::size_t d = 1; d < n; ++d) {
        double best = 0.0;
        for (std::size_t i = 0; i + d < n; ++i)
            best = std::max(best, std::abs(v[i + d] - v[i]));
        m[d] = best;
    }
    return m;
}

double statistic_from_lag_maxima(const std::vector<double>& m, int level, double alpha) {
    const double scale = std::pow(2.0, -level);
    double best = 0.0;
    for (std::size_t d = 1; d < m.size(); ++d)
        best = std::max(best, m[d] / std::pow(static_cast<double>(d) * scale, alpha));
    return best;
}

double chaining_bound(const SampledPath& path, double alpha) {
    // sup over levels of (max adjacent increment at that level) * 2^{l*alpha},
    // inflated by the geometric chaining factor
    double sup = 0.0;
    SampledPath cur = path;
    for (int l = path.level; l >= 2; --l) {
        double adj = 0.0;
        for (std::size_t i = 0; i + 1 < cur.values.size(); ++i)
            adj = std::max(adj, std::abs(cur.values[i + 1] - cur.values[i]));
        sup = std::max(sup, adj * std::pow(2.0, l * alpha));
        if (l > 2) cur = cur.coarsen(1);
    }
    return 2.0 / (1.0 - std::pow(2.0, -alpha)) * sup;
}

}  // namespace

HolderStatistic holder_statistic(const SampledPath& path, double alpha) {
    path.validate();
    if (alpha < 0.0 || alpha >= 1.0) throw InputError("alpha must lie in [0, 1)");
    HolderStatistic out;
    out.alpha = alpha;
    out.level = path.level;
    if (alpha == 0.0) {
        const auto [lo, hi] = std::minmax_element(path.values.begin(), path.values.end());
        out.M = *hi - *lo;
        return out;
    }
    if (path.level <= kExactLevelCap) {
        out.M = statistic_from_lag_maxima(lag_maxima(path.values), path.level, alpha);
    } else {
        out.M = chaining_bound(path, alpha);
        out.exact = false;
    }
    return out;
}

KolmogorovReport kolmogorov_report(const std::vector<SampledPath>& paths, double p,
                                   double epsilon, const std::vector<double>& alphas) {
    if (paths.empty()) throw InputError("need at least one path");
    if (!(p > 0.0)) throw InputError("moment order p must be > 0");
    const int L = paths.front().level;
    if (L < 4) throw InputError("need level >= 4 for the three-level comparison");
    for (const auto& path : paths) {
        path.validate();
        if (path.level != L) throw InputError("paths must share a common level");
    }
    for (double a : alphas)
        if (!(a > 0.0) || a >= 1.0) throw InputError("alphas must lie in (0, 1)");

    KolmogorovReport rep;
    rep.p = p;
    rep.epsilon = epsilon;

    // per path, per sub-level: lag maxima (or the chaining inputs beyond the cap)
    const int n_levels = 3;
    std::vector<std::vector<HolderStatistic>> stats;  // [alpha][flattened path x level]
    stats.resize(alphas.size());

    for (const auto& path : paths) {
        SampledPath cur = path;
        std::vector<std::vector<double>> maxima(n_levels);
        std::vector<SampledPath> coarse(n_levels);
        for (int s = 0; s < n_levels; ++s) {
            coarse[s] = cur;
            if (cur.level <= kExactLevelCap) maxima[s] = lag_maxima(cur.values);
            if (s + 1 < n_levels) cur = cur.coarsen(1);
        }
        for (std::size_t a = 0; a < alphas.size(); ++a) {
            for (int s = 0; s < n_levels; ++s) {
                HolderStatistic h;
                h.alpha = alphas[a];
                h.level = coarse[s].level;
                if (!maxima[s].empty()) {
                    h.M = statistic_from_lag_maxima(maxima[s], coarse[s].level, alphas[a]);
                } else {
                    h.M = chaining_bound(coarse[s], alphas[a]);
                    h.exact = false;
                }
                stats[a].push_back(h);
            }
        }
    }

    const double n_paths = static_cast<double>(paths.size());
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        std::vector<double> mean_by_level(n_levels, 0.0);
        for (std::size_t j = 0; j < stats[a].size(); ++j)
            mean_by_level[j % n_levels] += std::pow(stats[a][j].M, p) / n_paths;
        // coarsest first in the emitted table
        bool stable = true;
        double prev = 0.0;
        for (int s = n_levels - 1; s >= 0; --s) {
            KolmogorovRow row;
            row.alpha = alphas[a];
            row.level = L - s;
            row.mean_Mp = mean_by_level[s];
            if (s == n_levels - 1) {
                row.growth = std::numeric_limits<double>::quiet_NaN();
            } else {
                row.growth = prev > 0.0 ? row.mean_Mp / prev : 1.0;
                if (row.growth >= 1.10) stable = false;
            }
            prev = row.mean_Mp;
            rep.rows.push_back(row);
        }
        rep.verdicts.push_back({alphas[a], stable ? "stable" : "diverging"});
    }
    return rep;
}

MomentFit moment_exponent_fit(const std::vector<SampledPath>& paths, double p) {
    if (paths.empty()) throw InputError("need at least one path");
    if (!(p > 0.0)) throw InputError("moment order p must be > 0");
    const int L = paths.front().level;
    for (const auto& path : paths) {
        path.validate();
        if (path.level != L) throw InputError("paths must share a common level");
    }
    if (L < 3) throw InputError("need at least 3 dyadic lags (level >= 3)");

    std::vector<double> xs, ys;
    for (int k = 0; k < L; ++k) {
        const std::size_t d = std::size_t{1} << k;
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& path : paths) {
            const auto& v = path.values;
            for (std::size_t i = 0; i + d < v.size(); ++i) {
                sum += std::pow(std::abs(v[i + d] - v[i]), p);
                ++count;
            }
        }
        const double mean = sum / static_cast<double>(count);
        if (mean <= 0.0) continue;  // flat path at this lag
        xs.push_back(std::log(static_cast<double>(d) * std::pow(2.0, -L)));
        ys.push_back(std::log(mean));
    }
    if (xs.size() < 3) throw InputError("fewer than 3 usable lags");

    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / n;
        my += ys[i] / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    MomentFit fit;
    fit.exponent_hat = sxy / sxx;
    fit.c_hat = std::exp(my - fit.exponent_hat * mx);
    return fit;
}

}  // namespace gx
