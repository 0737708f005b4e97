#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "repscat/potential.hpp"

namespace repscat {

// Phase-adapted radial mesh.  Nodes are uniform in the stretched coordinate
// tau with d tau / d x = sigma(x), sigma ~ sqrt(2 lambda_ref + r^alpha), so
// the number of points per local wavelength is constant across the grid.
// Solves happen in the Liouville variable w = sigma^{1/2} u, in which the
// second-derivative stencil is a plain symmetric uniform one:
//
//   (H - z) u = psi   <=>   -1/2 w_tt + (U - z / sigma^2) w = sigma^{-3/2} psi,
//   U = (V_eff + Gamma_map) / sigma^2,
//   Gamma_map = -(3/4 sigma'^2 / sigma - 1/2 sigma'') / (2 sigma^2) ... (see
//   ChannelOperator::assemble for the exact expression).
//
// d = 1 grids span the full line symmetrically; d >= 2 grids span (0, L]
// with a Dirichlet condition at the origin.  A smooth local refinement of
// sigma near x = 0 resolves the |x|^alpha kink of the true potential.

struct GridParams {
    double L = 1000.0;          // requested truncation radius
    int order = 4;              // interior stencil order (2, 4, 6, 8)
    double ppw = 16.0;          // points per wavelength at lambda_ref
    double lambda_ref = 1.0;    // reference energy for the mesh density
    double origin_spacing = 2e-4;  // target node spacing at x = 0 (0 = off)
    double origin_width = 0.6;     // width of the refinement bump
    double pad_fraction = 0.0;     // absorber pad length as a fraction of L
    std::int64_t max_nodes = 8'000'000;
};

class ChannelGrid {
  public:
    /// Builds the mesh for a potential spec; throws std::invalid_argument on
    /// a degenerate request (L < 4, unsupported order) and std::runtime_error
    /// when the node budget is exceeded.
    ChannelGrid(const PotentialSpec& spec, const GridParams& params);

    const PotentialSpec& spec() const { return spec_; }
    const GridParams& params() const { return params_; }

    int size() const { return static_cast<int>(x_.size()); }
    bool full_line() const { return full_line_; }
    double dtau() const { return dtau_; }
    double L_actual() const { return L_actual_; }

    const Eigen::VectorXd& x() const { return x_; }        // node coordinates
    const Eigen::VectorXd& t() const { return t_; }        // |x| per node
    const Eigen::VectorXd& sigma() const { return sigma_; }
    const Eigen::VectorXd& f() const { return f_; }        // escape function
    const Eigen::VectorXd& weight() const { return w_; }   // dr quadrature

    /// Whether node i lies in the physical region |x| <= L (pad nodes carry
    /// the absorber and are excluded from norms, shells and extraction).
    bool physical(int i) const { return physical_[i] != 0; }
    bool has_pad() const { return has_pad_; }

    /// Dyadic shells: shell n holds nodes with 2^n <= f < 2^{n+1}.
    int shell_count() const { return static_cast<int>(shells_.size()); }
    const std::vector<int>& shell(int n) const { return shells_[n]; }

    /// Number of shells completely inside the (non-pad) grid: shells
    /// 0 .. complete_shells() - 1 are full dyadic intervals.
    int complete_shells() const { return complete_shells_; }

    /// Nearest node to a given escape-function value (non-pad region).
    int node_near_f(double f_value) const;

    /// Nodes restricted to x > 0 (right half; identity for half-line grids).
    const std::vector<int>& right_half() const { return right_; }
    const std::vector<int>& left_half() const { return left_; }

    /// sigma'(x), sigma''(x) at nodes (analytic; used by the assembly).
    const Eigen::VectorXd& dsigma() const { return dsigma_; }
    const Eigen::VectorXd& d2sigma() const { return d2sigma_; }

  private:
    PotentialSpec spec_;
    GridParams params_;
    bool full_line_ = false;
    bool has_pad_ = false;
    double dtau_ = 0.0;
    double L_actual_ = 0.0;
    int complete_shells_ = 0;
    Eigen::VectorXd x_, t_, sigma_, dsigma_, d2sigma_, f_, w_;
    std::vector<char> physical_;
    std::vector<std::vector<int>> shells_;
    std::vector<int> right_, left_;
};

using GridPtr = std::shared_ptr<const ChannelGrid>;

GridPtr build_grid(const PotentialSpec& spec, const GridParams& params);

/// Estimated interior node count from the mesh-density quadrature
/// integral( sigma ) / dtau, without building the mesh.
double estimate_node_count(const PotentialSpec& spec, const GridParams& params);

// Complex grid function with shell-norm accessors.
struct WaveField {
    GridPtr grid;
    Eigen::VectorXcd values;

    WaveField() = default;
    WaveField(GridPtr g, Eigen::VectorXcd v) : grid(std::move(g)), values(std::move(v)) {}
    static WaveField zero(const GridPtr& g);
};

struct ShellNorms {
    double B = 0.0;
    double Bstar = 0.0;
    std::vector<double> profile;  // 2^{-n/2} ||F_n u|| per shell
};

/// Agmon-Hormander style norms over the dyadic shells of the grid.
ShellNorms shell_norms(const WaveField& u);

/// L2 inner product and norm with the dr quadrature weights (pad excluded).
std::complex<double> inner(const WaveField& a, const WaveField& b);
double norm_l2(const WaveField& a);

/// Weighted L2 norm || f^s u ||.
double norm_weighted(const WaveField& a, double s);

/// Least-squares slope of log2(profile) against the shell index, ignoring
/// empty shells; negative slope = decaying profile.
double profile_slope(const std::vector<double>& profile);

/// Interpolation-free stencil weights for the m-th derivative at x0 from
/// arbitrary nodes (Fornberg's recurrence).
Eigen::VectorXd fornberg_weights(double x0, const Eigen::VectorXd& nodes, int m);

}  // namespace repscat
