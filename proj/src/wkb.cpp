#include "repscat/wkb.hpp"

#include <cmath>
#include <stdexcept>

#include "repscat/geometry.hpp"
#include "repscat/quadrature.hpp"

namespace repscat {

TailWkb::TailWkb(const PotentialSpec& spec, Channel channel, Complex z, int sign)
    : spec_(spec), centrifugal_(channel.coefficient(spec.d)), z_(z), sign_(sign) {
    real_energy_ = z.imag() == 0.0;
}

Complex TailWkb::k2_signed(double t) const {
    // For the lower-sign reference everything is the conjugate of the
    // upper-sign reference at conj(z).
    const Complex zz = sign_ >= 0 ? z_ : std::conj(z_);
    return 2.0 * zz - 2.0 * spec_.q(t) + std::pow(t, spec_.alpha) -
           centrifugal_ / (t * t);
}

Complex TailWkb::k2(double t) const { return k2_signed(t); }

Complex TailWkb::k(double t) const {
    const Complex v = k2_signed(t);
    if (v.imag() == 0.0 && v.real() <= 0.0)
        throw BranchCutError("TailWkb::k: classically forbidden radius");
    return std::sqrt(v);
}

Complex TailWkb::dk(double t) const {
    const Complex d_k2 = -2.0 * spec_.dq(t) +
                         spec_.alpha * std::pow(t, spec_.alpha - 1.0) +
                         2.0 * centrifugal_ / (t * t * t);
    return 0.5 * d_k2 / k(t);
}

Complex TailWkb::d2k(double t) const {
    const Complex d2_k2 =
        -2.0 * spec_.d2q(t) +
        spec_.alpha * (spec_.alpha - 1.0) * std::pow(t, spec_.alpha - 2.0) -
        6.0 * centrifugal_ / (t * t * t * t);
    const Complex kk = k(t), dkk = dk(t);
    return 0.5 * d2_k2 / kk - dkk * dkk / kk;
}

Complex TailWkb::delta2(double t) const {
    const Complex kk = k(t), k1 = dk(t), k2v = d2k(t);
    return 3.0 * k1 * k1 / (8.0 * kk * kk * kk) - k2v / (4.0 * kk * kk);
}

Complex TailWkb::ddelta2(double t) const {
    const Complex kk = k(t);
    const Complex A1 = -2.0 * spec_.dq(t) +
                       spec_.alpha * std::pow(t, spec_.alpha - 1.0) +
                       2.0 * centrifugal_ / (t * t * t);
    const Complex A2 =
        -2.0 * spec_.d2q(t) +
        spec_.alpha * (spec_.alpha - 1.0) * std::pow(t, spec_.alpha - 2.0) -
        6.0 * centrifugal_ / (t * t * t * t);
    const Complex A3 =
        -2.0 * spec_.d3q(t) +
        spec_.alpha * (spec_.alpha - 1.0) * (spec_.alpha - 2.0) *
            std::pow(t, spec_.alpha - 3.0) +
        24.0 * centrifugal_ / (t * t * t * t * t);
    const Complex k1 = 0.5 * A1 / kk;
    const Complex k2v = 0.5 * A2 / kk - k1 * k1 / kk;
    const Complex k3 = 0.5 * A3 / kk - 0.5 * A2 * k1 / (kk * kk) -
                       2.0 * k1 * k2v / kk + k1 * k1 * k1 / (kk * kk);
    return 1.25 * k1 * k2v / (kk * kk * kk) -
           1.125 * k1 * k1 * k1 / (kk * kk * kk * kk) - 0.25 * k3 / (kk * kk);
}

Complex TailWkb::log_derivative(double t) const {
    const Complex w1 = k(t) + delta2(t);
    const Complex dw1 = dk(t) + ddelta2(t);
    const Complex i(0.0, 1.0);
    const Complex val = i * w1 - 0.5 * dw1 / w1;
    return sign_ >= 0 ? val : std::conj(val);
}

double TailWkb::drift_integrand(double s) const {
    // k - theta' computed through (k^2 - theta'^2)/(k + theta'); the
    // numerator is exact, so no cancellation at large radii:
    //   k^2 - theta'^2 = -2 q - c/s^2 - lambda^2 s^{-alpha}
    const double lambda = z_.real();
    const double num = -(2.0 * spec_.q(s) + centrifugal_ / (s * s) +
                         lambda * lambda * std::pow(s, -spec_.alpha));
    const double den =
        k(s).real() + eikonal_phase_dr(spec_.alpha, lambda, s);
    return num / den + delta2(s).real();
}

double TailWkb::drift_phase(double t) const {
    if (!real_energy_)
        throw std::logic_error("TailWkb::drift_phase requires a real energy");
    auto integrand = [&](double s) { return drift_integrand(s); };
    return -integrate_tail(integrand, t, 1e-13);
}

std::vector<double> TailWkb::drift_profile(const std::vector<double>& ts) const {
    std::vector<double> out(ts.size(), 0.0);
    if (ts.empty()) return out;
    auto integrand = [&](double s) { return drift_integrand(s); };
    double acc = drift_phase(ts.back());
    out.back() = acc;
    for (int i = static_cast<int>(ts.size()) - 2; i >= 0; --i) {
        acc -= integrate(integrand, ts[i], ts[i + 1], 1e-14, 12);
        out[i] = acc;
    }
    return out;
}

Complex TailWkb::trace_corrector(double t) const {
    return trace_corrector(t, drift_phase(t));
}

Complex TailWkb::trace_corrector(double t, double drift) const {
    if (!real_energy_)
        throw std::logic_error("TailWkb::trace_corrector requires a real energy");
    const double w1 = (k(t) + delta2(t)).real();
    const double amp = std::pow(t, 0.25 * spec_.alpha) / std::sqrt(w1);
    const Complex val = amp * std::exp(Complex(0.0, drift));
    return sign_ >= 0 ? val : std::conj(val);
}

Complex TailWkb::extraction_corrector(double t, double drift) const {
    if (!real_energy_)
        throw std::logic_error(
            "TailWkb::extraction_corrector requires a real energy");
    // Upper-sign functional value 1/2 t^{alpha/4} e^{-i theta} (A + a0) w_+
    // with A applied analytically; the lower-sign functional on the
    // conjugate reference is the complex conjugate.
    const double lambda = z_.real();
    const GeometryJet gj = geometry_jet(spec_.alpha, spec_.d, t);
    const Complex i(0.0, 1.0);
    const Complex w1 = k(t) + delta2(t);  // real at real energies
    const Complex dw1 = dk(t) + ddelta2(t);
    const Complex logd_up = i * w1 - 0.5 * dw1 / w1;
    const Complex a_op = -i * gj.f.d1 * logd_up - 0.5 * i * gj.f.d2;
    const double a0 = phase_a0(lambda, t, spec_);
    const double amp = std::pow(t, 0.25 * spec_.alpha) / std::sqrt(w1.real());
    const Complex lam_up = amp * std::exp(Complex(0.0, drift));
    const Complex val = 0.5 * lam_up * (a_op + a0);
    return sign_ >= 0 ? val : std::conj(val);
}

}  // namespace repscat
