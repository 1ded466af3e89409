#pragma once

#include <cmath>
#include <cstdint>

namespace gx {

// Counter-based stream: every draw is a pure function of (seed, stream, counter),
// so parallel schedules cannot change the numbers.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : base_(mix(seed ^ 0x9e3779b97f4a7c15ULL) ^ mix(stream + 0x6a09e667f3bcc909ULL)) {}

    std::uint64_t next_u64() { return mix(base_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    // uniform in (0,1)
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // standard normal via polar rejection; cached second value
    double next_normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_uniform() - 1.0;
            v = 2.0 * next_uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * m;
        has_cached_ = true;
        return u * m;
    }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }

    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t base_;
    std::uint64_t counter_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// Order-independent reduction helper.
double pairwise_sum(const double* data, std::size_t n);

}  // namespace gx
