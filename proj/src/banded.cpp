#include "repscat/banded.hpp"

#include <cmath>
#include <stdexcept>

namespace repscat {

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
      band_(Eigen::MatrixXcd::Zero(2 * kl + ku + 1, n)), pivots_(n, 0) {
    if (n <= 0 || kl < 0 || ku < 0)
        throw std::invalid_argument("BandedMatrix: bad dimensions");
}

std::complex<double>& BandedMatrix::at(int i, int j) {
    const int row = kl_ + ku_ + i - j;
    if (i < 0 || i >= n_ || j < 0 || j >= n_ || row < 0 || row >= ldab_)
        throw std::out_of_range("BandedMatrix::at outside band");
    return band_(row, j);
}

std::complex<double> BandedMatrix::get(int i, int j) const {
    const int row = kl_ + ku_ + i - j;
    if (i < 0 || i >= n_ || j < 0 || j >= n_ || row < 0 || row >= ldab_)
        return {0.0, 0.0};
    return band_(row, j);
}

Eigen::VectorXcd BandedMatrix::multiply(const Eigen::VectorXcd& x) const {
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n_);
    for (int j = 0; j < n_; ++j) {
        const int ilo = std::max(0, j - ku_), ihi = std::min(n_ - 1, j + kl_);
        for (int i = ilo; i <= ihi; ++i)
            y(i) += band_(kl_ + ku_ + i - j, j) * x(j);
    }
    return y;
}

void BandedMatrix::factorize() {
    // Unblocked banded LU with partial pivoting (row swaps stay inside the
    // widened band).
    const int kv = kl_ + ku_;
    int ju = 0;
    for (int j = 0; j < n_; ++j) {
        const int km = std::min(kl_, n_ - 1 - j);
        int jp = 0;
        double best = std::abs(band_(kv, j));
        for (int p = 1; p <= km; ++p) {
            const double mag = std::abs(band_(kv + p, j));
            if (mag > best) {
                best = mag;
                jp = p;
            }
        }
        pivots_[j] = j + jp;
        if (best == 0.0)
            throw std::runtime_error("BandedMatrix: singular pivot at column " +
                                     std::to_string(j));
        ju = std::max(ju, std::min(j + ku_ + jp, n_ - 1));
        if (jp != 0) {
            for (int c = j; c <= ju; ++c)
                std::swap(band_(kv + j - c, c), band_(kv + j + jp - c, c));
        }
        const std::complex<double> piv = band_(kv, j);
        for (int p = 1; p <= km; ++p) band_(kv + p, j) /= piv;
        for (int c = j + 1; c <= ju; ++c) {
            const std::complex<double> top = band_(kv + j - c, c);
            if (top == std::complex<double>(0.0, 0.0)) continue;
            for (int p = 1; p <= km; ++p)
                band_(kv + j + p - c, c) -= band_(kv + p, j) * top;
        }
    }
    factorized_ = true;
}

Eigen::VectorXcd BandedMatrix::solve(const Eigen::VectorXcd& b) const {
    if (!factorized_) throw std::logic_error("BandedMatrix::solve before factorize");
    const int kv = kl_ + ku_;
    Eigen::VectorXcd x = b;
    for (int j = 0; j < n_ - 1; ++j) {
        const int jp = pivots_[j];
        if (jp != j) std::swap(x(j), x(jp));
        const int km = std::min(kl_, n_ - 1 - j);
        for (int p = 1; p <= km; ++p) x(j + p) -= band_(kv + p, j) * x(j);
    }
    for (int j = n_ - 1; j >= 0; --j) {
        x(j) /= band_(kv, j);
        const int ilo = std::max(0, j - kv);
        for (int i = ilo; i < j; ++i) x(i) -= band_(kv + i - j, j) * x(j);
    }
    return x;
}

}  // namespace repscat
