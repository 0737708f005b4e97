#pragma once

#include <string>

namespace repscat {

// Radial perturbation families.  The decay rate rho is measured against the
// escape function: |q| <= C0 f^{-1-rho}, |q'| <= C1 f^{-2-rho}.
enum class TailKind { none, inverse_power, gaussian };

struct PotentialTail {
    TailKind kind = TailKind::none;
    double coupling = 0.0;
    double power = 2.0;   // s in coupling * (1 + t^2)^{-s/2}
    double width = 1.0;   // gaussian width
};

struct PotentialSpec {
    double alpha = 1.0;   // supported range [0.7, 1.9]
    int d = 1;
    PotentialTail tail;
    double rho = 1.0;     // declared decay rate (escape-time scale)

    double q(double t) const;
    double dq(double t) const;    // d/dt
    double d2q(double t) const;
    double d3q(double t) const;

    /// True potential -1/2 |x|^alpha + q at |x| = t.
    double potential(double t) const;

    /// Builds and validates a spec. rho < 0 requests the rate implied by the
    /// tail family.  Throws std::invalid_argument on violations.
    static PotentialSpec make(double alpha, int d, PotentialTail tail,
                              double rho = -1.0);
};

/// Sampled verification of the short-range condition: fits the smallest
/// constants with |q| <= C0 f^{-1-rho} and |q'| <= C1 f^{-2-rho} on a log
/// grid of radii.  ok is false when no finite constant works (growing ratio).
struct ShortRangeFit {
    double C0 = 0.0;
    double C1 = 0.0;
    bool ok = false;
    std::string message;
};

ShortRangeFit validate_short_range(const PotentialSpec& spec, double t_max = 1e4,
                                   int n_samples = 200);

}  // namespace repscat
