#pragma once

#include <complex>
#include <vector>

#include "repscat/hamiltonian.hpp"
#include "repscat/phase.hpp"
#include "repscat/potential.hpp"

namespace repscat {

// Outgoing reference solution on the repulsive tail.
//
// The reduced channel equation -1/2 u'' + (V_eff - z) u = 0 has local
// wavenumber k(t) = sqrt(2 z - 2 q + t^alpha - c_ell / t^2).  The outgoing
// reference carried here is the second-order WKB solution
//
//   w(t) = (k + d2)^{-1/2} exp( i Int (k + d2) dt ),
//   d2   = 3 k'^2 / (8 k^3) - k'' / (4 k^2),
//
// normalized against the model phase theta so that
// t^{alpha/4} e^{-i theta} w(t) -> 1 as t -> infinity.  The normalizing
// phase is the convergent tail integral of (k - theta' + d2), evaluated by
// quadrature.  Everything here is analytic in the potential; no grid data
// enters.  The leftover error of the reference is the third-order WKB
// correction, far below the tolerances this library certifies.
class TailWkb {
  public:
    TailWkb(const PotentialSpec& spec, Channel channel, Complex z, int sign);

    Complex z() const { return z_; }
    int sign() const { return sign_; }

    Complex k2(double t) const;   // squared local wavenumber
    Complex k(double t) const;    // principal branch
    Complex dk(double t) const;
    Complex d2k(double t) const;
    Complex delta2(double t) const;
    Complex ddelta2(double t) const;

    /// Logarithmic derivative u'/u of the radiating reduced solution at t.
    /// For sign = -1 this is the conjugate reference (incoming).
    Complex log_derivative(double t) const;

    // --- real-energy extras (throw for complex z) ---

    /// Phase offset theta(t) - W(t) -> 0: minus the tail integral of
    /// (k - theta' + d2) from t to infinity.
    double drift_phase(double t) const;

    /// Values of drift_phase at an ascending list of radii, computed with a
    /// single tail quadrature plus incremental panels.
    std::vector<double> drift_profile(const std::vector<double>& ts) const;

    /// Lambda(t) = t^{alpha/4} e^{-i theta} w(t): the finite-radius value of
    /// the normalized trace of the reference outgoing wave.  Tends to 1.
    Complex trace_corrector(double t) const;
    Complex trace_corrector(double t, double drift) const;

    /// Finite-radius value of the xi-extraction functional on the reference
    /// outgoing wave (tends to 1); divides out the systematic part of the
    /// asymptotic-data extraction.
    Complex extraction_corrector(double t, double drift) const;

  private:
    PotentialSpec spec_;
    double centrifugal_ = 0.0;
    Complex z_;
    int sign_ = +1;
    bool real_energy_ = false;

    Complex k2_signed(double t) const;
    double drift_integrand(double s) const;
};

}  // namespace repscat
