#include "repscat/fieldops.hpp"

#include <cmath>

#include "repscat/geometry.hpp"

namespace repscat {

namespace {

Eigen::VectorXd central_first(int order) {
    switch (order) {
        case 2: {
            Eigen::VectorXd w(3);
            w << -0.5, 0.0, 0.5;
            return w;
        }
        case 4: {
            Eigen::VectorXd w(5);
            w << 1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12;
            return w;
        }
        case 6: {
            Eigen::VectorXd w(7);
            w << -1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60;
            return w;
        }
        default: {
            Eigen::VectorXd w(9);
            w << 1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0, 4.0 / 5, -1.0 / 5,
                4.0 / 105, -1.0 / 280;
            return w;
        }
    }
}

}  // namespace

Eigen::VectorXcd grid_derivative(const ChannelGrid& g, const Eigen::VectorXcd& u) {
    const int n = g.size();
    const int order = g.params().order;
    const int hw = order / 2;
    const Eigen::VectorXd wc = central_first(order);
    const int width = order + 1;
    Eigen::VectorXd taus(width);
    for (int k = 0; k < width; ++k) taus(k) = k;
    Eigen::VectorXcd ut(n);
    for (int i = 0; i < n; ++i) {
        std::complex<double> acc = 0.0;
        if (i >= hw && i < n - hw) {
            for (int k = 0; k < width; ++k) acc += wc(k) * u(i - hw + k);
        } else if (i < hw) {
            const Eigen::VectorXd we = fornberg_weights(i, taus, 1);
            for (int k = 0; k < width; ++k) acc += we(k) * u(k);
        } else {
            const Eigen::VectorXd we =
                fornberg_weights(width - 1 - (n - 1 - i), taus, 1);
            for (int k = 0; k < width; ++k) acc += we(k) * u(n - width + k);
        }
        ut(i) = acc / g.dtau();
    }
    // du/dx = sigma du/dtau
    for (int i = 0; i < n; ++i) ut(i) *= g.sigma()(i);
    return ut;
}

Eigen::VectorXcd apply_conjugate_op(const ChannelGrid& g,
                                    const Eigen::VectorXcd& u) {
    const Eigen::VectorXcd ux = grid_derivative(g, u);
    const double alpha = g.spec().alpha;
    const int d = g.spec().d;
    Eigen::VectorXcd out(g.size());
    const std::complex<double> mi(0.0, -1.0);
    for (int i = 0; i < g.size(); ++i) {
        const GeometryJet gj = geometry_jet(alpha, d, g.t()(i));
        const double sg = g.x()(i) >= 0.0 ? 1.0 : -1.0;
        // du/ds = sign(x) du/dx with s = |x|
        out(i) = mi * (gj.f.d1 * sg * ux(i) + 0.5 * gj.f.d2 * u(i));
    }
    return out;
}

Eigen::VectorXcd apply_pf(const ChannelGrid& g, const Eigen::VectorXcd& u) {
    const Eigen::VectorXcd ux = grid_derivative(g, u);
    const double alpha = g.spec().alpha;
    const int d = g.spec().d;
    Eigen::VectorXcd out(g.size());
    const std::complex<double> mi(0.0, -1.0);
    for (int i = 0; i < g.size(); ++i) {
        const GeometryJet gj = geometry_jet(alpha, d, g.t()(i));
        const double sg = g.x()(i) >= 0.0 ? 1.0 : -1.0;
        const double t = std::max(g.t()(i), 1e-300);
        std::complex<double> rad = sg * ux(i);
        if (d > 1) rad -= 0.5 * (d - 1) / t * u(i);
        out(i) = mi * gj.f.d1 * rad;
    }
    return out;
}

double angular_form(const ChannelGrid& g, const Channel& ch,
                    const Eigen::VectorXcd& u, double f_exponent) {
    const int d = g.spec().d;
    const double c_ang = ch.ell * (ch.ell + d - 2);
    if (d == 1 || c_ang == 0.0) return 0.0;
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        if (!g.physical(i)) continue;
        const GeometryJet gj = geometry_jet(g.spec().alpha, d, g.t()(i));
        const double t = std::max(g.t()(i), 1e-300);
        acc += std::pow(g.f()(i), f_exponent) * gj.f.d1 * gj.f.d1 / (t * t) *
               std::norm(u(i)) * g.weight()(i);
    }
    return c_ang * acc;
}

FactorizationResult factorization_residual(const ChannelOperator& op,
                                           const PhaseContext& ctx, Complex z,
                                           int sign, const Eigen::VectorXcd& u) {
    const ChannelGrid& g = op.grid();
    const PotentialSpec& spec = g.spec();
    const int n = g.size();

    // LHS: (H - z) u with the discrete Hamiltonian.
    Eigen::VectorXcd lhs = op.apply(u);
    for (int i = 0; i < n; ++i) lhs(i) -= z * u(i);

    // RHS: 1/2 (A +- a) r^alpha (A -+ a) u + ell-term + q2 u, with a and q2
    // from their closed forms and A applied by grid differentiation.
    Eigen::VectorXcd av(n);
    for (int i = 0; i < n; ++i)
        av(i) = phase_a(z, g.t()(i), sign, spec, ctx);

    Eigen::VectorXcd inner_term = apply_conjugate_op(g, u);
    for (int i = 0; i < n; ++i)
        inner_term(i) = std::pow(smoothed_radius(g.t()(i)).v, spec.alpha) *
                        (inner_term(i) - static_cast<double>(sign) * av(i) * u(i));
    Eigen::VectorXcd rhs = apply_conjugate_op(g, inner_term);
    for (int i = 0; i < n; ++i)
        rhs(i) = 0.5 * (rhs(i) + static_cast<double>(sign) * av(i) * inner_term(i));

    const double c_ang =
        op.channel().ell * (op.channel().ell + spec.d - 2);
    for (int i = 0; i < n; ++i) {
        const double t = g.t()(i);
        if (c_ang != 0.0) {
            const GeometryJet gj = geometry_jet(spec.alpha, spec.d, t);
            const double ra = std::pow(smoothed_radius(t).v, spec.alpha);
            rhs(i) += 0.5 * ra * gj.f.d1 * gj.f.d1 * c_ang / (t * t) * u(i);
        }
        rhs(i) += q2_remainder(z, t, sign, spec, ctx) * u(i);
    }

    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!g.physical(i)) continue;
        num += std::norm(lhs(i) - rhs(i)) * g.weight()(i);
        den += std::norm(u(i)) * g.weight()(i);
    }
    FactorizationResult res;
    res.norm_u = std::sqrt(den);
    res.residual = std::sqrt(num) / std::max(res.norm_u, 1e-300);
    return res;
}

}  // namespace repscat
