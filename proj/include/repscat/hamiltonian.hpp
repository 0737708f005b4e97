#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "repscat/banded.hpp"
#include "repscat/grid.hpp"

namespace repscat {

/// Angular sector.  For d >= 2 the reduced radial operator carries the
/// centrifugal term [ell (ell + d - 2) + (d-1)(d-3)/4] / (2 t^2); d = 1 has a
/// single full-line sector.
struct Channel {
    int ell = 0;
    double coefficient(int d) const {
        return ell * (ell + d - 2) + 0.25 * (d - 1) * (d - 3);
    }
};

enum class ClosureKind { dirichlet, impedance, wkb_dtn, absorber };

/// Boundary data for the assembled system.  kappa_* are outgoing/incoming
/// logarithmic derivatives u'/u at the right/left truncation nodes; the
/// absorber instead ramps a complex potential on the pad region.
struct ClosureValues {
    ClosureKind kind = ClosureKind::dirichlet;
    std::complex<double> kappa_right{0.0, 0.0};
    std::complex<double> kappa_left{0.0, 0.0};
    double absorber_strength = 0.04;
};

// Reduced radial Hamiltonian on a phase-adapted grid, assembled in the
// Liouville variable w = sigma^{1/2} u where the interior stencil is the
// plain symmetric uniform one (exactly Hermitian rows).
class ChannelOperator {
  public:
    ChannelOperator(GridPtr grid, Channel channel,
                    std::function<double(double)> potential_override = {});

    const ChannelGrid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    const Channel& channel() const { return channel_; }

    /// Effective 1D potential at |x| = t (true |x|^alpha, centrifugal term).
    double potential(double t) const;

    /// H u at every node (skewed same-order stencils near the ends).
    Eigen::VectorXcd apply(const Eigen::VectorXcd& u) const;

    /// |<u, H v> - <H u, v>| with the dr quadrature.  Exactly zero up to
    /// roundoff for interior-supported fields; boundary rows are the only
    /// non-Hermitian element.
    double hermiticity_defect(const Eigen::VectorXcd& u,
                              const Eigen::VectorXcd& v) const;

    /// Assembles (H - z) with the given closure, acting on w.  Use
    /// rhs_from() / field_from() to convert between u and w conventions.
    BandedMatrix assemble(std::complex<double> z, const ClosureValues& bc) const;

    Eigen::VectorXcd rhs_from(const Eigen::VectorXcd& psi) const;   // sigma^{-3/2} psi
    Eigen::VectorXcd field_from(const Eigen::VectorXcd& w) const;   // sigma^{-1/2} w

    /// Number of boundary rows on each side that use skewed stencils.
    int boundary_halfwidth() const { return hw_; }

    const Eigen::VectorXd& diagonal_term() const { return U0_; }

  private:
    GridPtr grid_;
    Channel channel_;
    std::function<double(double)> potential_override_;
    int hw_ = 1;                 // stencil halfwidth = order / 2
    Eigen::VectorXd stencil2_;   // central second-derivative weights (per dtau^2)
    Eigen::VectorXd U0_;         // (V_eff + map correction) / sigma^2
    Eigen::VectorXd inv_sigma2_;
    Eigen::MatrixXd edge2_lo_, edge2_hi_;  // skewed second-derivative rows
    Eigen::VectorXd dbound_lo_, dbound_hi_;  // one-sided first-derivative rows

    void second_derivative_row(int i,
                               std::vector<std::pair<int, double>>& out) const;
};

}  // namespace repscat
