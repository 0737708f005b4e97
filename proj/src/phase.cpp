#include "repscat/phase.hpp"

#include <cmath>

#include "repscat/geometry.hpp"

namespace repscat {

namespace {

Complex branch_sqrt(Complex s, const char* where) {
    if (s.imag() == 0.0 && s.real() <= 0.0)
        throw BranchCutError(std::string(where) +
                             ": argument on the branch cut (-inf, 0]");
    return std::sqrt(s);  // principal branch, Re > 0 off the cut
}

}  // namespace

double PhaseContext::beta_c() const {
    const double b = 1.0 - 0.5 * alpha;
    return std::min(rho + 1.0 / b, 1.0 + alpha / b);
}

PhaseContext PhaseContext::choose(const PotentialSpec& spec, double lambda_min,
                                  double lambda_max) {
    PhaseContext ctx;
    ctx.alpha = spec.alpha;
    ctx.d = spec.d;
    ctx.rho = spec.rho;
    ctx.lambda_min = lambda_min;
    ctx.lambda_max = lambda_max;
    // Smallest m with 2 lambda_min - 2 q0 + r^alpha > 1 wherever f > 2^m,
    // checked by dense sampling of the inner part of the support.
    for (int m = 0; m < 40; ++m) {
        const double f_lo = std::ldexp(1.0, m);
        bool ok = true;
        for (int i = 0; i <= 400 && ok; ++i) {
            const double f = f_lo * (1.0 + i * 0.05);
            const double t = escape_radius(spec.alpha, f);
            const double g = 2.0 * lambda_min - 2.0 * q0_effective(spec, t) +
                             std::pow(smoothed_radius(t).v, spec.alpha);
            ok = g > 1.0;
        }
        if (ok) {
            ctx.m = m;
            return ctx;
        }
    }
    throw std::invalid_argument("PhaseContext: no admissible cutoff index found");
}

double q0_effective(const PotentialSpec& spec, double t) {
    const GeometryJet g = geometry_jet(spec.alpha, spec.d, t);
    const double r = g.r.v;
    const double a = spec.alpha;
    const double ra = std::pow(r, a);
    return spec.q(t) + 0.125 * ra * g.lap_f * g.lap_f +
           0.25 * a * std::pow(r, 0.5 * a - 1.0) * g.lap_f +
           0.25 * ra * g.grad_lap_f - 0.25 * a / (r * r);
}

double dq0_dt(const PotentialSpec& spec, double t) {
    const GeometryJet g = geometry_jet(spec.alpha, spec.d, t);
    const double r = g.r.v, r1 = g.r.d1;
    const double a = spec.alpha;
    const double ra = std::pow(r, a);
    const double dra = a * std::pow(r, a - 1.0) * r1;
    double out = spec.dq(t);
    out += 0.125 * (dra * g.lap_f * g.lap_f + ra * 2.0 * g.lap_f * g.dlap_f_dt);
    out += 0.25 * a *
           ((0.5 * a - 1.0) * std::pow(r, 0.5 * a - 2.0) * r1 * g.lap_f +
            std::pow(r, 0.5 * a - 1.0) * g.dlap_f_dt);
    out += 0.25 * (dra * g.grad_lap_f + ra * g.d_grad_lap_f_dt);
    out += 0.5 * a * r1 / (r * r * r);
    return out;
}

Complex phase_a(Complex z, double t, int sign, const PotentialSpec& spec,
                const PhaseContext& ctx) {
    const double a = spec.alpha;
    const double f = escape_function(a, t);
    const double chibar = 1.0 - cutoff(f / std::ldexp(1.0, ctx.m));
    if (chibar == 0.0) return {0.0, 0.0};
    const double r = smoothed_radius(t).v;
    const double q0 = q0_effective(spec, t);
    const Complex D = 2.0 * (z - q0) + std::pow(r, a);
    const Complex root = branch_sqrt(D, "phase_a");
    const double rma = std::pow(r, -0.5 * a);
    const double rma1 = std::pow(r, -0.5 * a - 1.0);
    const Complex i(0.0, 1.0);
    const double sg = sign >= 0 ? 1.0 : -1.0;
    Complex val = rma * root + sg * i * (0.5 * a) * rma1 -
                  sg * i * (0.5 * a) * ((z - q0) / D) * rma1;
    return chibar * val;
}

double phase_a0(double lambda, double t, const PotentialSpec& spec) {
    const double a = spec.alpha;
    const double r = smoothed_radius(t).v;
    const double D = 2.0 * lambda - 2.0 * q0_effective(spec, t) + std::pow(r, a);
    if (D <= 0.0)
        throw BranchCutError("phase_a0: 2 lambda - 2 q0 + r^alpha not positive");
    return std::pow(r, -0.5 * a) * std::sqrt(D);
}

Complex q2_remainder(Complex z, double t, int sign, const PotentialSpec& spec,
                     const PhaseContext& ctx) {
    (void)ctx;
    const double a = spec.alpha;
    const GeometryJet g = geometry_jet(spec.alpha, spec.d, t);
    const double r = g.r.v, r1 = g.r.d1;
    const double q0 = q0_effective(spec, t);
    const double q0t = dq0_dt(spec, t);
    const Complex N = z - q0;
    const Complex D = 2.0 * N + std::pow(r, a);
    const Complex root = branch_sqrt(D, "q2_remainder");
    // radial-vector derivatives: (grad r . grad) g = r'(t) dg/dt
    const double dr_q0 = r1 * q0t;
    const Complex dN_dt = -q0t;
    const Complex dD_dt = -2.0 * q0t + a * std::pow(r, a - 1.0) * r1;
    const Complex dr_ratio = r1 * (dN_dt * D - N * dD_dt) / (D * D);
    const Complex ratio = N / D;
    const Complex i(0.0, 1.0);
    const double sg = sign >= 0 ? 1.0 : -1.0;
    return sg * i * 0.5 * dr_q0 / root - 0.25 * a * dr_ratio / r +
           0.25 * a * ratio * (1.0 + 0.5 * a) / (r * r) -
           0.125 * a * a * ratio * ratio / (r * r);
}

double eikonal_residual(const PotentialSpec& spec, double lambda, double t,
                        PhaseKind kind) {
    if (t >= 2.0) {
        // Outside the smoothing region the balance telescopes exactly:
        // standard phase leaves lambda^2 r^{-alpha}/2 + q, the exact free
        // phase (alpha = 1) leaves q alone.
        if (kind == PhaseKind::standard)
            return 0.5 * lambda * lambda * std::pow(t, -spec.alpha) + spec.q(t);
        return spec.q(t) + 0.5 * ((t + 2.0 * lambda) - std::pow(t, spec.alpha)) -
               lambda;
    }
    const double grad_theta = kind == PhaseKind::standard
                                  ? eikonal_phase(spec.alpha, lambda, t).dt
                                  : exact_free_phase(lambda, t).dt;
    return 0.5 * grad_theta * grad_theta - 0.5 * std::pow(t, spec.alpha) +
           spec.q(t) - lambda;
}

ResidualFit fit_eikonal_residual(const PotentialSpec& spec, double lambda,
                                 PhaseKind kind, double f_lo, double f_hi, int n) {
    ResidualFit fit;
    std::vector<double> lx, ly;
    // The decay exponent is an asymptotic order: fit on the upper part of the
    // window where the power law has settled.
    const double f_fit = f_lo * std::pow(f_hi / f_lo, 2.0 / 3.0);
    for (int i = 0; i < n; ++i) {
        const double f =
            f_lo * std::pow(f_hi / f_lo, static_cast<double>(i) / (n - 1));
        const double t = escape_radius(spec.alpha, f);
        const double res = std::abs(eikonal_residual(spec, lambda, t, kind));
        fit.f_values.push_back(f);
        fit.residuals.push_back(res);
        // cancellation floor of the direct balance (the standard phase on
        // r >= 2 uses the telescoped form and has no cancellation)
        const double floor = (kind == PhaseKind::standard && t >= 2.0)
                                 ? 1e-280
                                 : 512.0 * 1e-16 * std::max(1.0, t);
        if (res > 10.0 * floor && f >= f_fit) {
            lx.push_back(std::log(f));
            ly.push_back(std::log(res));
        }
    }
    if (lx.size() < 5) {
        fit.exact = true;  // residual at machine noise across the window
        return fit;
    }
    fit.slope = -fit_slope(lx, ly).slope;
    return fit;
}

}  // namespace repscat
