#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "repscat/extrapolate.hpp"
#include "repscat/potential.hpp"

namespace repscat {

using Complex = std::complex<double>;

/// Thrown when 2(z - q0) + r^alpha lands on the branch cut (-inf, 0] of the
/// principal square root.  Arguments are never silently continued.
struct BranchCutError : std::domain_error {
    explicit BranchCutError(const std::string& what) : std::domain_error(what) {}
};

// Context for the complex asymptotic phase: the dyadic cutoff index m is the
// smallest one with 2 Re z - 2 q0 + r^alpha > 1 on the support of the outer
// cutoff, over the configured energy window.
struct PhaseContext {
    double alpha = 1.0;
    int d = 1;
    double rho = 1.0;
    int m = 0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;

    /// min(rho + 1/(1-alpha/2), 1 + alpha/(1-alpha/2)); the critical weight
    /// exponent for radiation bounds.
    double beta_c() const;

    static PhaseContext choose(const PotentialSpec& spec, double lambda_min,
                               double lambda_max);
};

/// Effective potential shift entering the asymptotic phase:
/// q0 = q + 1/8 r^a (lap f)^2 + a/4 r^{a/2-1} (lap f) + 1/4 r^a (grad f . grad)(lap f)
///      - a/4 r^{-2},  with the smoothed radius throughout.
double q0_effective(const PotentialSpec& spec, double t);

/// d/dt of q0 (analytic; used by the factorization remainder).
double dq0_dt(const PotentialSpec& spec, double t);

/// Complex asymptotic phase a_z at |x| = t for z in the upper (sign=+1) or
/// lower (sign=-1) half plane closure.  Includes the outer cutoff factor.
Complex phase_a(Complex z, double t, int sign, const PotentialSpec& spec,
                const PhaseContext& ctx);

/// Real limiting phase used in eigenfunction asymptotics:
/// a0 = r^{-alpha/2} sqrt(2 lambda - 2 q0 + r^alpha), no cutoff factor.
double phase_a0(double lambda, double t, const PotentialSpec& spec);

/// Closed-form remainder in the operator factorization of H - z
/// on the outer region (see factorization_residual for the identity).
Complex q2_remainder(Complex z, double t, int sign, const PotentialSpec& spec,
                     const PhaseContext& ctx);

enum class PhaseKind { standard, exact_free };

/// Pointwise eikonal residual 1/2 |grad theta|^2 - 1/2 |x|^alpha + q - lambda
/// with the true |x|^alpha and the chosen phase.
double eikonal_residual(const PotentialSpec& spec, double lambda, double t,
                        PhaseKind kind = PhaseKind::standard);

struct ResidualFit {
    std::vector<double> f_values;
    std::vector<double> residuals;  // per-sample |residual|
    double slope = 0.0;             // fitted decay exponent of |res| ~ f^{-slope}
    bool exact = false;             // all samples at machine-noise level
};

/// Samples the residual on a log grid in f and fits the decay exponent.
ResidualFit fit_eikonal_residual(const PotentialSpec& spec, double lambda,
                                 PhaseKind kind, double f_lo, double f_hi,
                                 int n = 64);

}  // namespace repscat
