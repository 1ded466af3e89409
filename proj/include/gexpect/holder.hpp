#pragma once

#include <string>
#include <vector>

namespace gx {

// uniform dyadic sample of a path on [0, 1]: 2^level + 1 values
struct SampledPath {
    int level = 2;
    std::vector<double> values;

    void validate() const;             // throws InputError
    SampledPath coarsen(int drop) const;  // keep every 2^drop-th sample
};

struct HolderStatistic {
    double alpha = 0.0;
    double M = 0.0;
    int level = 0;
    bool exact = true;  // false when the chaining bound replaced enumeration
};

// M = sup over dyadic pairs of |X_t - X_s| / |t - s|^alpha; exact pair
// enumeration up to level 12, chaining upper bound beyond
HolderStatistic holder_statistic(const SampledPath& path, double alpha);

struct KolmogorovRow {
    double alpha = 0.0;
    int level = 0;
    double mean_Mp = 0.0;    // empirical mean of M^p across paths
    double growth = 0.0;     // ratio to the previous level, NaN on the first
};

struct KolmogorovVerdict {
    double alpha = 0.0;
    std::string verdict;  // "stable" | "diverging" (heuristic 10%-per-level proxy)
};

struct KolmogorovReport {
    double p = 0.0;
    double epsilon = 0.0;
    std::vector<KolmogorovRow> rows;       // levels L-2, L-1, L per alpha
    std::vector<KolmogorovVerdict> verdicts;
};

KolmogorovReport kolmogorov_report(const std::vector<SampledPath>& paths, double p,
                                   double epsilon, const std::vector<double>& alphas);

struct MomentFit {
    double c_hat = 0.0;
    double exponent_hat = 0.0;
};

// least-squares fit of log mean |X_t - X_s|^p against log |t - s| over dyadic lags
MomentFit moment_exponent_fit(const std::vector<SampledPath>& paths, double p);

}  // namespace gx
