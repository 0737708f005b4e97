#include "repscat/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "repscat/airy.hpp"
#include "repscat/geometry.hpp"
#include "repscat/incident.hpp"

namespace repscat {

namespace {

using C = std::complex<double>;

// Ladder limit.  Amplitude mismatches of the stripped basis cancel in the
// coefficient ratios, so the window values converge essentially as fast as
// the phase reference allows; extrapolating only amplifies propagation
// noise.  Take the outermost value and let the ladder gaps measure the error.
ConvergenceRecord ladder_limit(const std::vector<C>& vals,
                               const PotentialSpec& spec) {
    (void)spec;
    ConvergenceRecord rec;
    rec.values = vals;
    rec.extrapolated = vals;
    rec.limit = vals.back();
    if (vals.size() >= 2) {
        rec.last_delta = std::abs(vals.back() - vals[vals.size() - 2]);
        rec.converged =
            rec.last_delta <= 1e-6 * std::max(1.0, std::abs(rec.limit));
    }
    if (vals.size() >= 3) {
        const double num = std::abs(vals[vals.size() - 2] - vals[vals.size() - 3]);
        const double den = rec.last_delta;
        if (den > 0.0 && num > 0.0) rec.fitted_rate = std::log2(num / den);
    }
    return rec;
}

using LD = long double;

// exp of the traceless 2x2 Magnus generator [[d, h], [h g, -d]]:
// m2 = d^2 + h^2 g, E = c0(m2) I + c1(m2) M with entire c0, c1.  Extended
// precision keeps per-step roundoff from accumulating over the millions of
// steps a long tail integration takes.
void magnus_exp(LD d, LD h, LD gbar, LD out[4]) {
    const LD m2 = d * d + h * h * gbar;
    LD c0, c1;
    if (m2 > -1e-8L && m2 < 1e-8L) {
        c0 = 1.0L + m2 / 2.0L + m2 * m2 / 24.0L;
        c1 = 1.0L + m2 / 6.0L + m2 * m2 / 120.0L;
    } else if (m2 > 0.0L) {
        const LD s = sqrtl(m2);
        c0 = coshl(s);
        c1 = sinhl(s) / s;
    } else {
        const LD s = sqrtl(-m2);
        c0 = cosl(s);
        c1 = sinl(s) / s;
    }
    out[0] = c0 + c1 * d;   // (0,0)
    out[1] = c1 * h;        // (0,1)
    out[2] = c1 * h * gbar; // (1,0)
    out[3] = c0 - c1 * d;   // (1,1)
}

// Fourth-order two-point Gauss Magnus step; *err receives the gap to the
// midpoint-rule (second-order) step from the same evaluations, a cheap and
// conservative local error proxy.
void magnus_step(const std::function<double(double)>& g, LD a, LD h, LD out[4],
                 LD* err = nullptr) {
    const LD c1 = 0.5L - sqrtl(3.0L) / 6.0L;
    const LD c2 = 0.5L + sqrtl(3.0L) / 6.0L;
    const LD g1 = g(static_cast<double>(a + c1 * h));
    const LD g2 = g(static_cast<double>(a + c2 * h));
    const LD gbar = 0.5L * (g1 + g2);
    const LD d = sqrtl(3.0L) / 12.0L * h * h * (g1 - g2);
    magnus_exp(d, h, gbar, out);
    if (err) {
        LD low[4];
        magnus_exp(0.0L, h, gbar, low);
        LD e = 0.0L;
        for (int i = 0; i < 4; ++i) e = std::max(e, fabsl(out[i] - low[i]));
        *err = e;
    }
}

void mat_mul(const LD a[4], const LD b[4], LD out[4]) {
    out[0] = a[0] * b[0] + a[1] * b[2];
    out[1] = a[0] * b[1] + a[1] * b[3];
    out[2] = a[2] * b[0] + a[3] * b[2];
    out[3] = a[2] * b[1] + a[3] * b[3];
}

// adaptive fundamental-matrix propagation across [a, b]; the embedded
// low-order gap controls the step (order-3 estimate for an order-4 step, so
// the working tolerance is loosened to tol^{3/4})
void propagate_matrix(const std::function<double(double)>& g, double a, double b,
                      LD M[4], double tol) {
    LD x = a;
    LD h = std::min(0.05, b - a);
    const LD tol_eff = 0.5L * powl(static_cast<LD>(tol), 0.75L);
    while (x < static_cast<LD>(b) - 1e-15L * std::max(1.0L, static_cast<LD>(b))) {
        h = std::min(h, static_cast<LD>(b) - x);
        LD step[4];
        LD err = 0.0L;
        magnus_step(g, x, h, step, &err);
        LD scale = 0.0L;
        for (int i = 0; i < 4; ++i) scale = std::max(scale, fabsl(step[i]));
        const LD target = tol_eff * std::max(1.0L, scale);
        const bool accept = err <= target || h <= 1e-9L * std::max(1.0L, x);
        if (accept) {
            LD next[4];
            mat_mul(step, M, next);
            for (int i = 0; i < 4; ++i) M[i] = next[i];
            x += h;
        }
        const double ratio =
            err > 0.0L ? static_cast<double>(target / err) : 32.0;
        h *= static_cast<LD>(
            std::min(3.0, std::max(0.3, 0.9 * std::pow(ratio, 1.0 / 3.0))));
    }
}

// Oracle-side leading drift: the tail integral of (k0 - theta') with
// k0 = sqrt(2 lambda + t^a - 2 q - c/t^2), evaluated with geometric
// Gauss panels and a power-law remainder estimate (independent of the
// pipeline's corrector machinery).
double oracle_drift(const PotentialSpec& spec, double c_ell, double lambda,
                    double t0) {
    auto integrand = [&](double s) {
        // stable difference: (k^2 - theta'^2)/(k + theta'), plus the
        // second-order phase correction 3k'^2/(8k^3) - k''/(4k^2)
        const double A = 2.0 * lambda + std::pow(s, spec.alpha) -
                         2.0 * spec.q(s) - c_ell / (s * s);
        const double A1 = spec.alpha * std::pow(s, spec.alpha - 1.0) -
                          2.0 * spec.dq(s) + 2.0 * c_ell / (s * s * s);
        const double A2 =
            spec.alpha * (spec.alpha - 1.0) * std::pow(s, spec.alpha - 2.0) -
            2.0 * spec.d2q(s) - 6.0 * c_ell / (s * s * s * s);
        const double kk = std::sqrt(A);
        const double k1 = 0.5 * A1 / kk;
        const double k2v = 0.5 * A2 / kk - k1 * k1 / kk;
        const double d2 = 3.0 * k1 * k1 / (8.0 * kk * kk * kk) -
                          k2v / (4.0 * kk * kk);
        const double num = -(2.0 * spec.q(s) + c_ell / (s * s) +
                             lambda * lambda * std::pow(s, -spec.alpha));
        return num / (kk + eikonal_phase_dr(spec.alpha, lambda, s)) + d2;
    };
    // 12-point Gauss-Legendre per panel
    static const double xs[6] = {0.1252334085114689, 0.3678314989981802,
                                 0.5873179542866175, 0.7699026741943047,
                                 0.9041172563704749, 0.9815606342467192};
    static const double ws[6] = {0.2491470458134028, 0.2334925365383548,
                                 0.2031674267230659, 0.1600783285433462,
                                 0.1069393259953184, 0.0471753363865118};
    auto panel = [&](double a, double b) {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double acc = 0.0;
        for (int i = 0; i < 6; ++i)
            acc += ws[i] * (integrand(mid + half * xs[i]) +
                            integrand(mid - half * xs[i]));
        return half * acc;
    };
    double total = 0.0, a = t0, last = 0.0, prev = 0.0;
    for (int k = 0; k < 220; ++k) {
        const double b = a * 1.5;
        prev = last;
        last = panel(a, b);
        total += last;
        a = b;
        if (k > 4 && std::abs(last) < 1e-15) break;
        if (k > 4 && prev != 0.0) {
            const double ratio = last / prev;
            if (std::abs(ratio) < 0.95 && std::abs(last * ratio / (1.0 - ratio)) <
                                              1e-14 * std::max(1.0, std::abs(total)))
                break;
        }
    }
    // power-law remainder
    if (prev != 0.0 && std::abs(last / prev) < 0.95)
        total += last * (last / prev) / (1.0 - last / prev);
    return -total;
}

struct CoefMatrix {
    // rows: (c+, c-), columns: the two fundamental solutions
    C cp1, cp2, cm1, cm2;
};

// Fit outgoing/incoming amplitudes of the two fundamental solutions at a
// radius pair, stripping the model phase plus the leading drift.
CoefMatrix fit_coefficients(const PotentialSpec& spec, double c_ell,
                            double lambda, double t1, double t2,
                            const OdeState s1[2], const OdeState s2[2]) {
    auto basis = [&](double t) {
        const double th = eikonal_phase(spec.alpha, lambda, t).v +
                          oracle_drift(spec, c_ell, lambda, t);
        const double amp = std::pow(t, -0.25 * spec.alpha);
        return std::pair<C, C>(amp * std::exp(C(0.0, th)),
                               amp * std::exp(C(0.0, -th)));
    };
    const auto [gp1, gm1] = basis(t1);
    const auto [gp2, gm2] = basis(t2);
    const C det = gp1 * gm2 - gm1 * gp2;
    CoefMatrix w;
    // solve [gp gm; gp gm] [c+; c-] = [u(t1); u(t2)] for each column
    w.cp1 = (s1[0].u * gm2 - s2[0].u * gm1) / det;
    w.cm1 = (s2[0].u * gp1 - s1[0].u * gp2) / det;
    w.cp2 = (s1[1].u * gm2 - s2[1].u * gm1) / det;
    w.cm2 = (s2[1].u * gp1 - s1[1].u * gp2) / det;
    return w;
}

Eigen::MatrixXcd line_smatrix_from(const CoefMatrix& w, double C_exp) {
    // columns of S for incoming data on the left / right side; the ratio
    // cm/cp of the model prefactors contributes exp(i pi C/2)
    const C phase = std::polar(1.0, 0.5 * M_PI * C_exp);
    const C A = w.cp1 / (2.0 * w.cm1) - w.cp2 / (2.0 * w.cm2);
    const C B = w.cp1 / (2.0 * w.cm1) + w.cp2 / (2.0 * w.cm2);
    Eigen::MatrixXcd S(2, 2);
    S << phase * A, phase * B, phase * B, phase * A;
    return S;
}

}  // namespace

OdeState propagate_magnus(const std::function<double(double)>& g, double a,
                          double b, OdeState s, double tol) {
    LD M[4] = {1.0L, 0.0L, 0.0L, 1.0L};
    propagate_matrix(g, a, b, M, tol);
    return {static_cast<double>(M[0] * s.u + M[1] * s.du),
            static_cast<double>(M[2] * s.u + M[3] * s.du)};
}

std::pair<C, C> airy_outgoing(double lambda, double x) {
    // w(x) = sqrt(pi) e^{-i (lambda + pi/4)} (Bi + i Ai)(-(x + 2 lambda))
    const double t = x + 2.0 * lambda;
    const AiryValues v = airy(-t);
    const C pref = std::sqrt(M_PI) * std::polar(1.0, -(lambda + 0.25 * M_PI));
    const C w = pref * (C(v.bi, 0.0) + C(0.0, 1.0) * v.ai);
    const C dw = -pref * (C(v.dbi, 0.0) + C(0.0, 1.0) * v.dai);
    return {w, dw};
}

OracleResult airy_smatrix(double lambda) {
    OracleResult out;
    out.lambda = lambda;
    const auto [wp0, dwp0] = airy_outgoing(lambda, 0.0);
    const C wm0 = std::conj(wp0), dwm0 = std::conj(dwp0);
    const C A = 0.5 * (wm0 / wp0 - dwm0 / dwp0);
    const C B = -0.5 * (wm0 / wp0 + dwm0 / dwp0);
    const double C_exp = (1.0 + 0.5 - 1.0) / 1.5;  // (d + a/2 - 1)/(1 + a/2)
    const C phase = std::polar(1.0, 0.5 * M_PI * C_exp);
    out.S.resize(2, 2);
    out.S << phase * A, phase * B, phase * B, phase * A;
    out.unitarity_defect =
        (out.S.adjoint() * out.S - Eigen::MatrixXcd::Identity(2, 2)).norm();
    return out;
}

OracleResult ode_smatrix(double lambda, const PotentialSpec& spec,
                         Channel channel, double f_cap) {
    OracleResult out;
    out.lambda = lambda;
    const double c_ell = channel.coefficient(spec.d);
    auto g = [&](double t) {
        return -(2.0 * lambda + std::pow(std::abs(t), spec.alpha) -
                 2.0 * spec.q(t) - c_ell / (t * t));
    };

    // extraction ladder: doubling escape-function levels, capped so the
    // outermost radius stays within the integration budget
    double f_top = f_cap;
    while (f_top > 32.0 && escape_radius(spec.alpha, f_top) > 2.5e4)
        f_top *= 0.5;
    std::vector<double> levels;
    for (double f = 8.0; f <= f_top; f *= 2.0)
        levels.push_back(escape_radius(spec.alpha, f));
    if (levels.size() < 3)
        throw std::invalid_argument("ode_smatrix: ladder cap too small");
    out.radii = levels;

    const double C_exp =
        (spec.d + 0.5 * spec.alpha - 1.0) / (1.0 + 0.5 * spec.alpha);

    if (spec.d == 1) {
        OdeState s[2] = {{1.0, 0.0}, {0.0, 1.0}};
        double x = 0.0;
        std::vector<Eigen::MatrixXcd> ladder;
        for (double t1 : levels) {
            for (int c = 0; c < 2; ++c) s[c] = propagate_magnus(g, x, t1, s[c]);
            x = t1;
            // partner radius a quarter-wave out for conditioning
            const double k = std::sqrt(-g(t1));
            const double t2 = t1 + 0.5 * M_PI / k;
            OdeState s2[2] = {propagate_magnus(g, t1, t2, s[0]),
                              propagate_magnus(g, t1, t2, s[1])};
            const CoefMatrix w =
                fit_coefficients(spec, c_ell, lambda, t1, t2, s, s2);
            ladder.push_back(line_smatrix_from(w, C_exp));
        }
        // extrapolate entrywise with a fitted rate
        out.S.resize(2, 2);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                std::vector<C> vals;
                for (const auto& m : ladder) vals.push_back(m(i, j));
                const ConvergenceRecord rec = ladder_limit(vals, spec);
                out.S(i, j) = rec.limit;
                if (i == 0 && j == 0) out.record = rec;
            }
        }
        out.unitarity_defect =
            (out.S.adjoint() * out.S - Eigen::MatrixXcd::Identity(2, 2)).norm();
        return out;
    }

    // partial-wave channel: regular solution from the origin
    const double p = 0.5 + std::sqrt(c_ell + 0.25);
    const double t_start = 1e-4;
    OdeState s{std::pow(t_start, p), p * std::pow(t_start, p - 1.0)};
    double x = t_start;
    std::vector<C> ladder;
    const double parity = (channel.ell % 2) ? -1.0 : 1.0;
    for (double t1 : levels) {
        s = propagate_magnus(g, x, t1, s);
        x = t1;
        const double k = std::sqrt(-g(t1));
        const double t2 = t1 + 0.5 * M_PI / k;
        OdeState s2 = propagate_magnus(g, t1, t2, s);
        OdeState cols1[2] = {s, {0.0, 0.0}};
        OdeState cols2[2] = {s2, {0.0, 0.0}};
        const CoefMatrix w =
            fit_coefficients(spec, c_ell, lambda, t1, t2, cols1, cols2);
        // S_ell = e^{i pi C/2} (-1)^ell c+ / c-
        ladder.push_back(std::polar(1.0, 0.5 * M_PI * C_exp) * parity * w.cp1 /
                         w.cm1);
    }
    const ConvergenceRecord rec = ladder_limit(ladder, spec);
    out.record = rec;
    out.S.resize(1, 1);
    out.S(0, 0) = rec.limit;
    out.unitarity_defect = std::abs(std::abs(rec.limit) - 1.0);
    return out;
}

}  // namespace repscat
