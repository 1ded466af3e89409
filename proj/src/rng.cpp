#include "gexpect/rng.hpp"

namespace gx {

double pairwise_sum(const double* data, std::size_t n) {
    if (n == 0) return 0.0;
    if (n == 1) return data[0];
    if (n == 2) return data[0] + data[1];
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

}  // namespace gx
