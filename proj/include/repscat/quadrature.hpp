#pragma once

#include <complex>
#include <functional>

namespace repscat {

/// Adaptive Gauss-Legendre quadrature (15-point panels, bisection on
/// disagreement) for smooth integrands on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12, int max_depth = 40);

std::complex<double> integrate_c(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    double abs_tol = 1e-12, int max_depth = 40);

/// Integral over [r0, inf) of a decaying integrand, via the substitution
/// s = r0 / t mapping the tail to (0, 1].  The integrand must decay faster
/// than s^{-1}.
double integrate_tail(const std::function<double(double)>& f, double r0,
                      double abs_tol = 1e-12);

std::complex<double> integrate_tail_c(
    const std::function<std::complex<double>(double)>& f, double r0,
    double abs_tol = 1e-12);

}  // namespace repscat
