#include "repscat/extrapolate.hpp"

#include <cmath>

namespace repscat {

namespace {

void finalize(ConvergenceRecord& rec, double rel_tol) {
    const auto& d = rec.extrapolated;
    rec.limit = d.empty() ? std::complex<double>(0.0) : d.back();
    if (d.size() >= 2) {
        rec.last_delta = std::abs(d.back() - d[d.size() - 2]);
        const double scale = std::max(1e-300, std::abs(d.back()));
        rec.converged = rec.last_delta <= rel_tol * scale + 1e-15;
    } else if (d.size() == 1) {
        rec.converged = true;  // nothing left to compare
    }
    if (rec.values.size() >= 3) {
        const auto& v = rec.values;
        const double num = std::abs(v[v.size() - 2] - v[v.size() - 3]);
        const double den = std::abs(v[v.size() - 1] - v[v.size() - 2]);
        if (den > 0.0 && num > 0.0) rec.fitted_rate = std::log2(num / den);
    }
}

}  // namespace

ConvergenceRecord richardson(const std::vector<std::complex<double>>& values,
                             const std::vector<double>& exponents,
                             double rel_tol) {
    ConvergenceRecord rec;
    rec.values = values;
    const int n = static_cast<int>(values.size());
    if (n == 0) return rec;
    std::vector<std::complex<double>> col = values;
    const int levels = std::min<int>(static_cast<int>(exponents.size()), n - 1);
    for (int k = 1; k <= levels; ++k) {
        const double w = std::pow(2.0, exponents[k - 1]);
        std::vector<std::complex<double>> next(col.size() - 1);
        for (size_t j = 0; j + 1 < col.size(); ++j)
            next[j] = (w * col[j + 1] - col[j]) / (w - 1.0);
        col.swap(next);
    }
    // the fully extrapolated column: consecutive entries estimate the limit
    // from shifted data windows and their gap measures the leftover error
    rec.extrapolated = col;
    finalize(rec, rel_tol);
    return rec;
}

ConvergenceRecord aitken(const std::vector<std::complex<double>>& values,
                         double rel_tol) {
    ConvergenceRecord rec;
    rec.values = values;
    if (values.empty()) return rec;
    if (values.size() < 3) {
        rec.extrapolated.push_back(values.back());
        finalize(rec, rel_tol);
        return rec;
    }
    // Geometric elimination on every consecutive triple.
    for (size_t j = 0; j + 2 < values.size(); ++j) {
        const std::complex<double> d1 = values[j + 1] - values[j];
        const std::complex<double> d2 = values[j + 2] - values[j + 1];
        if (std::abs(d1) == 0.0 || std::abs(d2 / d1) > 0.99) {
            rec.extrapolated.push_back(values[j + 2]);
        } else {
            const std::complex<double> ratio = d2 / d1;
            rec.extrapolated.push_back(values[j + 2] +
                                       d2 * ratio / (1.0 - ratio));
        }
    }
    finalize(rec, rel_tol);
    return rec;
}

SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    SlopeFit fit;
    const size_t n = std::min(x.size(), y.size());
    if (n < 2) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0.0) return fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy * sxx - sx * sxy) / det;
    for (size_t i = 0; i < n; ++i)
        fit.max_residual = std::max(
            fit.max_residual, std::abs(y[i] - fit.slope * x[i] - fit.intercept));
    return fit;
}

std::vector<double> observed_orders(const std::vector<double>& errors) {
    std::vector<double> orders;
    for (size_t i = 0; i + 1 < errors.size(); ++i) {
        if (errors[i] > 0.0 && errors[i + 1] > 0.0)
            orders.push_back(std::log2(errors[i] / errors[i + 1]));
    }
    return orders;
}

}  // namespace repscat
