#include "gexpect/gfunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gexpect/errors.hpp"

namespace gx {

SymMatrix SymMatrix::from_rows(std::size_t d, std::vector<double> rows) {
    if (d == 0 || rows.size() != d * d) throw InputError("SymMatrix dimension mismatch");
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            if (std::abs(rows[i * d + j] - rows[j * d + i]) > 1e-12)
                throw InputError("matrix not symmetric");
    for (double v : rows)
        if (!std::isfinite(v)) throw InputError("non-finite matrix entry");
    return SymMatrix{d, std::move(rows)};
}

void validate_theta(const ThetaSet& theta) {
    if (const auto* iv = std::get_if<Interval1D>(&theta)) {
        if (!(iv->sigma_min >= 0.0) || !(iv->sigma_max > 0.0) ||
            iv->sigma_min > iv->sigma_max || !std::isfinite(iv->sigma_max))
            throw InputError("interval theta requires 0 <= sigma_min <= sigma_max, finite");
        return;
    }
    const auto& ml = std::get<MatrixList>(theta);
    if (ml.mats.empty() || ml.dim == 0) throw InputError("matrix theta must be nonempty");
    for (const auto& g : ml.mats) {
        if (g.size() != ml.dim * ml.dim) throw InputError("matrix theta dimension mismatch");
        for (double v : g)
            if (!std::isfinite(v)) throw InputError("non-finite theta entry");
    }
}

double g_value(const Interval1D& theta, double a) {
    validate_theta(ThetaSet{theta});
    const double s2max = theta.sigma_max * theta.sigma_max;
    const double s2min = theta.sigma_min * theta.sigma_min;
    return 0.5 * (s2max * std::max(a, 0.0) - s2min * std::max(-a, 0.0));
}

double g_value(const ThetaSet& theta, const SymMatrix& a) {
    validate_theta(theta);
    if (const auto* iv = std::get_if<Interval1D>(&theta)) {
        if (a.dim != 1) throw InputError("interval theta needs a 1x1 matrix");
        return g_value(*iv, a.a[0]);
    }
    const auto& ml = std::get<MatrixList>(theta);
    if (a.dim != ml.dim) throw InputError("theta / matrix dimension mismatch");
    const std::size_t d = ml.dim;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& g : ml.mats) {
        // tr(g gT A) = sum_{i,j,k} g_ik g_jk A_ij
        double tr = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                double ggt = 0.0;
                for (std::size_t k = 0; k < d; ++k) ggt += g[i * d + k] * g[j * d + k];
                tr += ggt * a.at(i, j);
            }
        best = std::max(best, 0.5 * tr);
    }
    return best;
}

double min_eigenvalue_sym(std::size_t d, const std::vector<double>& m_in) {
    std::vector<double> m = m_in;
    // cyclic Jacobi rotations
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) off += m[i * d + j] * m[i * d + j];
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = m[p * d + q];
                if (std::abs(apq) < 1e-300) continue;
                const double app = m[p * d + p], aqq = m[q * d + q];
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
                for (std::size_t k = 0; k < d; ++k) {
                    const double akp = m[k * d + p], akq = m[k * d + q];
                    m[k * d + p] = c * akp - s * akq;
                    m[k * d + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double apk = m[p * d + k], aqk = m[q * d + k];
                    m[p * d + k] = c * apk - s * aqk;
                    m[q * d + k] = s * apk + c * aqk;
                }
            }
    }
    double lo = m[0];
    for (std::size_t i = 1; i < d; ++i) lo = std::min(lo, m[i * d + i]);
    return lo;
}

DegeneracyReport degeneracy_report(const ThetaSet& theta) {
    validate_theta(theta);
    DegeneracyReport r;
    if (const auto* iv = std::get_if<Interval1D>(&theta)) {
        r.beta = 0.5 * iv->sigma_min * iv->sigma_min;
        r.nondegenerate = iv->sigma_min > 0.0;
        return r;
    }
    const auto& ml = std::get<MatrixList>(theta);
    const std::size_t d = ml.dim;
    double beta = std::numeric_limits<double>::infinity();
    for (const auto& g : ml.mats) {
        std::vector<double> ggt(d * d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t k = 0; k < d; ++k)
                    ggt[i * d + j] += g[i * d + k] * g[j * d + k];
        beta = std::min(beta, 0.5 * min_eigenvalue_sym(d, ggt));
    }
    r.beta = std::max(beta, 0.0);
    r.nondegenerate = r.beta > 0.0;
    return r;
}

}  // namespace gx
