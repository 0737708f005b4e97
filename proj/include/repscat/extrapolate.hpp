#pragma once

#include <complex>
#include <vector>

namespace repscat {

// Limits along doubling sequences.  A value sequence A_j sampled at
// parameters h_j = h_0 / 2^j (or windows [R_j, 2 R_j] with R_j = R_0 2^j)
// is extrapolated by Richardson elimination against a ladder of known decay
// exponents, or by Aitken-style elimination with a fitted exponent.

struct ConvergenceRecord {
    std::vector<double> params;                   // h_j or R_j
    std::vector<std::complex<double>> values;     // raw A_j
    std::vector<std::complex<double>> extrapolated;  // diagonal of the table
    std::complex<double> limit{0.0, 0.0};
    double last_delta = 0.0;   // |last two diagonal entries|
    double fitted_rate = 0.0;  // log2 ratio of successive differences
    bool converged = false;
};

/// Richardson table against exponents sigma_1 < sigma_2 < ... assuming the
/// parameter halves (error terms c_k * 2^{-j sigma_k}).  Values must be
/// ordered from coarsest to finest.
ConvergenceRecord richardson(const std::vector<std::complex<double>>& values,
                             const std::vector<double>& exponents,
                             double rel_tol = 1e-10);

/// Single-exponent elimination with the rate fitted from the data
/// (geometric Aitken).  Safe fallback when the ladder is unknown.
ConvergenceRecord aitken(const std::vector<std::complex<double>>& values,
                         double rel_tol = 1e-10);

/// Least-squares slope of y against x (used for log-log decay fits).
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;  // largest |y - fit| over the samples
};
SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Observed convergence order from errors at h, h/2, h/4, ...:
/// log2(e_j / e_{j+1}) for each consecutive pair.
std::vector<double> observed_orders(const std::vector<double>& errors);

}  // namespace repscat
