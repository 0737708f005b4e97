#pragma once

namespace repscat {

/// Ai, Bi and derivatives at a real argument.  Evaluated by the Maclaurin
/// series near the origin and analytic Taylor continuation (stepwise
/// recurrence for w'' = z w) elsewhere; accurate to ~1e-14 relative over the
/// moderate arguments this library needs (|z| up to a few hundred).
struct AiryValues {
    double ai = 0.0;
    double dai = 0.0;
    double bi = 0.0;
    double dbi = 0.0;
};

AiryValues airy(double z);

/// Wronskian Ai Bi' - Ai' Bi (exactly 1/pi); exposed for accuracy audits.
double airy_wronskian(double z);

}  // namespace repscat
