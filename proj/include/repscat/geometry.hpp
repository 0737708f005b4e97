#pragma once

#include <Eigen/Dense>

namespace repscat {

// Closed-form radial geometry for the repulsive Hamiltonian
//   H = 1/2 p^2 - 1/2 |x|^alpha + q(x),   0 < alpha < 2.
//
// All objects here are built from a fixed C^inf cutoff chi with
//   chi(s) = 1 for s <= 1,  chi(s) = 0 for s >= 2,  chi' <= 0,
// realized as the standard exp(-1/t) mollifier step.  From chi we get
//
//   r(x) = chi(|x|) + (1 - chi(|x|)) |x|        (smoothed radius, r >= 1)
//   f(x) = (r^{1-alpha/2} - 1)/(1 - alpha/2) + 1 (escape function, f >= 1)
//
// f measures classical travel time to infinity and is the natural variable
// for every decay rate in this library.  The oscillatory phase is
//
//   theta(lambda, x) = r^{1+alpha/2}/(1 + alpha/2) + lambda f,
//
// an approximate solution of the eikonal equation
// 1/2 |grad theta|^2 - 1/2 |x|^alpha + q = lambda.
//
// Everything is evaluated as a "jet": value plus the radial derivatives the
// rest of the library needs analytically (no grid differencing).

/// Value and first four derivatives of a scalar profile in one variable.
struct Jet4 {
    double v  = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
    double d4 = 0.0;
};

/// C^inf nonincreasing cutoff: 1 on (-inf,1], 0 on [2,inf).
double cutoff(double s);

/// cutoff value with derivatives d/ds up to fourth order.
Jet4 cutoff_jet(double s);

/// Smoothed radius r(t), t = |x|, with t-derivatives. r = 1 for t <= 1,
/// r = t for t >= 2, monotone and C^inf in between.
Jet4 smoothed_radius(double t);

/// Escape function f(r) as a profile of the smoothed radius (not of t).
/// f(1) = 1, f'(r) = r^{-alpha/2}.
Jet4 escape_profile(double alpha, double r);

/// f as a function of t = |x| (composition with the smoothed radius).
double escape_function(double alpha, double t);

/// Inverse of the escape function on r >= 1: the radius with f(r) = f_val.
double escape_radius(double alpha, double f_val);

// Full radial geometry at a point with t = |x|.  Gradients of radial
// profiles are F'(t) x_hat throughout, so scalars suffice.
struct GeometryJet {
    double t = 0.0;    // |x|
    Jet4 r;            // smoothed radius jet in t
    Jet4 f;            // escape function jet in t (composed)
    double lap_f = 0;      // Laplacian of f
    double dlap_f_dt = 0;  // d/dt of lap f
    double grad_lap_f = 0; // (grad f . grad) lap f  =  f'(t) * d/dt lap f
    double d_grad_lap_f_dt = 0; // d/dt of the previous entry
};

GeometryJet geometry_jet(double alpha, int d, double t);

/// theta(lambda, .) and its t-derivative at |x| = t (smoothed radius inside).
struct PhaseJet {
    double v  = 0.0;  // theta
    double dt = 0.0;  // d theta / dt
};
PhaseJet eikonal_phase(double alpha, double lambda, double t);

/// d theta / dr as a function of the smoothed radius alone (r >= 1).
double eikonal_phase_dr(double alpha, double lambda, double r);

/// Exact free phase for alpha = 1: (2/3)(r + 2 lambda)^{3/2}, valid where
/// r + 2 lambda > 0.  Solves the free eikonal equation exactly once r = |x|.
PhaseJet exact_free_phase(double lambda, double t);

/// The angular matrix |grad f|^2 I - (grad f)(grad f)^T at a point x.
/// Positive semidefinite, annihilates the radial direction.
Eigen::MatrixXd angular_matrix(double alpha, const Eigen::VectorXd& x);

// Regularized dyadic weight profile
//   w(f) = [1 - (1 + f/2^nu)^{-delta}] / delta,
// increasing and concave in f with w <= min(1/delta, f/2^nu).
struct WeightParams {
    double delta = 1.0;  // > 0
    int nu = 0;          // dyadic scale >= 0
};

/// w and derivatives in f up to third order.
Jet4 weight_jet(double f, const WeightParams& p);

}  // namespace repscat
