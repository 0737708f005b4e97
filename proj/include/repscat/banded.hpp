#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace repscat {

// Complex banded matrix in LAPACK-style band storage with room for the
// fill-in of partial pivoting.  Entry (i, j) with -kl <= i - j <= ku lives at
// band(kl + ku + i - j, j).
class BandedMatrix {
  public:
    BandedMatrix(int n, int kl, int ku);

    int size() const { return n_; }
    int lower() const { return kl_; }
    int upper() const { return ku_; }

    std::complex<double>& at(int i, int j);
    std::complex<double> get(int i, int j) const;
    void add(int i, int j, std::complex<double> v) { at(i, j) += v; }

    /// y = M x (uses the declared band only; valid before factorization).
    Eigen::VectorXcd multiply(const Eigen::VectorXcd& x) const;

    /// In-place LU with partial pivoting.  Throws std::runtime_error on an
    /// exactly singular pivot.
    void factorize();

    /// Solves M x = b after factorize().
    Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;

    bool factorized() const { return factorized_; }

  private:
    int n_, kl_, ku_, ldab_;
    bool factorized_ = false;
    Eigen::MatrixXcd band_;      // ldab x n
    std::vector<int> pivots_;
};

}  // namespace repscat
