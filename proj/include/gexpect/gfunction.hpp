#pragma once

#include <cstddef>
#include <variant>
#include <vector>

namespace gx {

// volatility uncertainty set: a 1-D interval or a finite list of d x d matrices
struct Interval1D {
    double sigma_min = 0.0;
    double sigma_max = 1.0;
};

struct MatrixList {
    std::size_t dim = 0;
    std::vector<std::vector<double>> mats;  // row-major d*d entries each
};

using ThetaSet = std::variant<Interval1D, MatrixList>;

struct SymMatrix {
    std::size_t dim = 0;
    std::vector<double> a;  // row-major, validated symmetric to 1e-12

    static SymMatrix from_rows(std::size_t d, std::vector<double> rows);  // throws on asymmetry
    double at(std::size_t i, std::size_t j) const { return a[i * dim + j]; }
};

void validate_theta(const ThetaSet& theta);  // throws InputError

// generator of volatility uncertainty: half the sup over the set of tr(ggT A)
double g_value(const ThetaSet& theta, const SymMatrix& a);
double g_value(const Interval1D& theta, double a);  // scalar case

struct DegeneracyReport {
    bool nondegenerate = false;
    double beta = 0.0;  // uniform ellipticity constant
};

DegeneracyReport degeneracy_report(const ThetaSet& theta);

// smallest eigenvalue of a symmetric matrix (Jacobi sweeps); exposed for tests
double min_eigenvalue_sym(std::size_t d, const std::vector<double>& m);

}  // namespace gx
