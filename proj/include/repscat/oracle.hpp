#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "repscat/extrapolate.hpp"
#include "repscat/hamiltonian.hpp"
#include "repscat/potential.hpp"

namespace repscat {

// Independent ground-truth generators.  Neither path touches the grid or the
// banded solver: the free alpha = 1 line problem is solved in closed form
// through Airy functions, and the general radial problem by a phase-exact
// Magnus propagator for u'' = g(r) u with asymptotic amplitudes read off a
// ladder of matching radii.

struct OracleResult {
    double lambda = 0.0;
    Eigen::MatrixXcd S;            // 2 x 2 on the line, 1 x 1 per channel
    double unitarity_defect = 0.0;
    ConvergenceRecord record;      // radius-ladder extrapolation (ODE path)
    std::vector<double> radii;     // extraction ladder
};

/// Exact scattering matrix of H = p^2/2 - |x|/2 at energy lambda (d = 1):
/// Airy matching at the origin, outgoing/incoming components identified
/// through their exact asymptotic phases re-based to the model phase theta.
OracleResult airy_smatrix(double lambda);

/// Paper-normalized outgoing solution of the same problem and its
/// x-derivative: w(x) ~ r^{-1/4} e^{i theta(lambda, x)} as x -> +infinity.
std::pair<std::complex<double>, std::complex<double>> airy_outgoing(
    double lambda, double x);

/// High-order ODE oracle for general (alpha, radial q, channel): adaptive
/// Magnus integration from the origin, two-radius amplitude fits on a
/// doubling ladder of escape-function levels, fitted-rate extrapolation.
/// d = 1 returns the full 2 x 2 matrix; d >= 2 the per-channel scalar.
OracleResult ode_smatrix(double lambda, const PotentialSpec& spec,
                         Channel channel = {}, double f_cap = 160.0);

/// Propagates (u, u') for u'' = g(t) u across [a, b] with the fourth-order
/// Magnus scheme (exposed for tests).
struct OdeState {
    double u = 0.0;
    double du = 0.0;
};
OdeState propagate_magnus(const std::function<double(double)>& g, double a,
                          double b, OdeState s, double tol = 3e-15);

}  // namespace repscat
