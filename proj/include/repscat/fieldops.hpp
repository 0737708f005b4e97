#pragma once

#include "repscat/grid.hpp"
#include "repscat/hamiltonian.hpp"
#include "repscat/phase.hpp"

namespace repscat {

/// du/dx at every node (sigma * du/dtau, full interior order, skewed ends).
Eigen::VectorXcd grid_derivative(const ChannelGrid& g, const Eigen::VectorXcd& u);

/// Conjugate operator on reduced radial fields:
///   A u = -i F'(t) du/ds - (i/2) F''(t) u,   s = |x|,
/// where F is the escape-function profile.  Valid in any dimension (the
/// angular reduction cancels all (d-1)/t terms).
Eigen::VectorXcd apply_conjugate_op(const ChannelGrid& g, const Eigen::VectorXcd& u);

/// Radial momentum along grad f on reduced fields:
///   p^f u = -i F'(t) (du/ds - (d-1)/(2t) u).
Eigen::VectorXcd apply_pf(const ChannelGrid& g, const Eigen::VectorXcd& u);

/// Angular quadratic form <p_j f^{s} ell_{jk} p_k> for a reduced channel
/// field: ell annihilates the radial direction, so the form reduces to
///   ell(ell+d-2) * integral f^{s} F'(t)^2 |u|^2 / t^2 dr.
double angular_form(const ChannelGrid& g, const Channel& ch,
                    const Eigen::VectorXcd& u, double f_exponent);

/// Relative residual of the outer-region operator factorization
///   H - z = 1/2 (A +- a) r^alpha (A -+ a) + 1/2 p_j r^alpha ell_jk p_k + q2
/// applied to a probe supported in the outer cutoff region.
struct FactorizationResult {
    double residual = 0.0;   // ||LHS - RHS|| / ||u||
    double norm_u = 0.0;
};
FactorizationResult factorization_residual(const ChannelOperator& op,
                                           const PhaseContext& ctx, Complex z,
                                           int sign, const Eigen::VectorXcd& u);

}  // namespace repscat
