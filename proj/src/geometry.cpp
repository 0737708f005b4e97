#include "repscat/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace repscat {

namespace {

// exp(-1/t) for t > 0, with derivatives up to fourth order; zero jet for t <= 0.
Jet4 bump_jet(double t) {
    Jet4 j;
    if (t <= 0.0) return j;
    // Underflows cleanly to the zero jet for tiny t.
    const double e = std::exp(-1.0 / t);
    if (e == 0.0) return j;
    const double it = 1.0 / t;
    const double it2 = it * it, it3 = it2 * it, it4 = it2 * it2;
    j.v = e;
    j.d1 = e * it2;
    j.d2 = e * (it4 - 2.0 * it3);
    j.d3 = e * (it2 * it4 - 6.0 * it2 * it3 + 6.0 * it4);
    j.d4 = e * (it4 * it4 - 12.0 * it4 * it3 + 36.0 * it3 * it3 - 24.0 * it3 * it2);
    return j;
}

// Quotient jet g = u / (u + v), computed recursively through
// u = g * w, w = u + v:  g^{(n)} = (u^{(n)} - sum binom * g^{(k)} w^{(n-k)}) / w.
Jet4 step_jet(const Jet4& u, const Jet4& v) {
    Jet4 w;
    w.v = u.v + v.v;
    w.d1 = u.d1 + v.d1;
    w.d2 = u.d2 + v.d2;
    w.d3 = u.d3 + v.d3;
    w.d4 = u.d4 + v.d4;
    Jet4 g;
    g.v = u.v / w.v;
    g.d1 = (u.d1 - g.v * w.d1) / w.v;
    g.d2 = (u.d2 - 2.0 * g.d1 * w.d1 - g.v * w.d2) / w.v;
    g.d3 = (u.d3 - 3.0 * g.d2 * w.d1 - 3.0 * g.d1 * w.d2 - g.v * w.d3) / w.v;
    g.d4 = (u.d4 - 4.0 * g.d3 * w.d1 - 6.0 * g.d2 * w.d2 - 4.0 * g.d1 * w.d3 -
            g.v * w.d4) / w.v;
    return g;
}

Jet4 negate_odd(Jet4 j) {
    j.d1 = -j.d1;
    j.d3 = -j.d3;
    return j;
}

}  // namespace

Jet4 cutoff_jet(double s) {
    Jet4 j;
    if (s <= 1.0) {
        j.v = 1.0;
        return j;
    }
    if (s >= 2.0) return j;
    // chi(s) = 1 - step(s-1) with step(t) = b(t) / (b(t) + b(1-t)).
    const double t = s - 1.0;
    Jet4 u = bump_jet(t);
    Jet4 v = negate_odd(bump_jet(1.0 - t));  // b(1-t) jet in t
    Jet4 g = step_jet(u, v);
    j.v = 1.0 - g.v;
    j.d1 = -g.d1;
    j.d2 = -g.d2;
    j.d3 = -g.d3;
    j.d4 = -g.d4;
    return j;
}

double cutoff(double s) { return cutoff_jet(s).v; }

Jet4 smoothed_radius(double t) {
    Jet4 j;
    if (t <= 1.0) {
        j.v = 1.0;
        return j;
    }
    if (t >= 2.0) {
        j.v = t;
        j.d1 = 1.0;
        return j;
    }
    // r = t + chi(t) (1 - t)
    Jet4 c = cutoff_jet(t);
    j.v = t + c.v * (1.0 - t);
    j.d1 = 1.0 + c.d1 * (1.0 - t) - c.v;
    j.d2 = c.d2 * (1.0 - t) - 2.0 * c.d1;
    j.d3 = c.d3 * (1.0 - t) - 3.0 * c.d2;
    j.d4 = c.d4 * (1.0 - t) - 4.0 * c.d3;
    return j;
}

Jet4 escape_profile(double alpha, double r) {
    if (r <= 0.0) throw std::domain_error("escape_profile: r must be positive");
    const double b = 1.0 - 0.5 * alpha;  // 1 - alpha/2 > 0
    Jet4 j;
    j.v = (std::pow(r, b) - 1.0) / b + 1.0;
    j.d1 = std::pow(r, -0.5 * alpha);
    j.d2 = -0.5 * alpha * std::pow(r, -0.5 * alpha - 1.0);
    j.d3 = 0.5 * alpha * (0.5 * alpha + 1.0) * std::pow(r, -0.5 * alpha - 2.0);
    j.d4 = -0.5 * alpha * (0.5 * alpha + 1.0) * (0.5 * alpha + 2.0) *
           std::pow(r, -0.5 * alpha - 3.0);
    return j;
}

double escape_function(double alpha, double t) {
    const Jet4 r = smoothed_radius(t);
    return escape_profile(alpha, r.v).v;
}

double escape_radius(double alpha, double f_val) {
    if (f_val < 1.0) throw std::domain_error("escape_radius: f must be >= 1");
    const double b = 1.0 - 0.5 * alpha;
    const double r = std::pow(1.0 + b * (f_val - 1.0), 1.0 / b);
    if (r >= 2.0) return r;  // outside the smoothing region the inverse is exact
    double lo = 0.0, hi = 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (escape_function(alpha, mid) < f_val)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

GeometryJet geometry_jet(double alpha, int d, double t) {
    GeometryJet g;
    g.t = t;
    g.r = smoothed_radius(t);
    if (t <= 1.0) {
        g.f.v = 1.0;
        return g;  // r and f constant near the origin: all derivatives vanish
    }
    const Jet4 fr = escape_profile(alpha, g.r.v);
    const Jet4& r = g.r;
    // Composition f(r(t)) by Faa di Bruno up to fourth order.
    Jet4 F;
    F.v = fr.v;
    F.d1 = fr.d1 * r.d1;
    F.d2 = fr.d2 * r.d1 * r.d1 + fr.d1 * r.d2;
    F.d3 = fr.d3 * r.d1 * r.d1 * r.d1 + 3.0 * fr.d2 * r.d1 * r.d2 + fr.d1 * r.d3;
    F.d4 = fr.d4 * r.d1 * r.d1 * r.d1 * r.d1 +
           6.0 * fr.d3 * r.d1 * r.d1 * r.d2 +
           fr.d2 * (3.0 * r.d2 * r.d2 + 4.0 * r.d1 * r.d3) + fr.d1 * r.d4;
    g.f = F;

    const double dm1 = static_cast<double>(d - 1);
    g.lap_f = F.d2 + dm1 * F.d1 / t;
    g.dlap_f_dt = F.d3 + dm1 * (F.d2 * t - F.d1) / (t * t);
    g.grad_lap_f = F.d1 * g.dlap_f_dt;
    const double d2lap =
        F.d4 + dm1 * (F.d3 / t - 2.0 * F.d2 / (t * t) + 2.0 * F.d1 / (t * t * t));
    g.d_grad_lap_f_dt = F.d2 * g.dlap_f_dt + F.d1 * d2lap;
    return g;
}

PhaseJet eikonal_phase(double alpha, double lambda, double t) {
    const Jet4 r = smoothed_radius(t);
    const Jet4 f = escape_profile(alpha, r.v);
    PhaseJet p;
    const double a2 = 1.0 + 0.5 * alpha;
    p.v = std::pow(r.v, a2) / a2 + lambda * f.v;
    p.dt = (std::pow(r.v, 0.5 * alpha) + lambda * f.d1) * r.d1;
    return p;
}

double eikonal_phase_dr(double alpha, double lambda, double r) {
    return std::pow(r, 0.5 * alpha) + lambda * std::pow(r, -0.5 * alpha);
}

PhaseJet exact_free_phase(double lambda, double t) {
    const Jet4 r = smoothed_radius(t);
    const double s = r.v + 2.0 * lambda;
    if (s <= 0.0)
        throw std::domain_error("exact_free_phase: r + 2 lambda must be positive");
    PhaseJet p;
    p.v = (2.0 / 3.0) * std::pow(s, 1.5);
    p.dt = std::sqrt(s) * r.d1;
    return p;
}

Eigen::MatrixXd angular_matrix(double alpha, const Eigen::VectorXd& x) {
    const int d = static_cast<int>(x.size());
    const double t = x.norm();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    if (t <= 1.0) return m;  // grad f vanishes where f is constant
    const GeometryJet g = geometry_jet(alpha, d, t);
    const Eigen::VectorXd xhat = x / t;
    const double g2 = g.f.d1 * g.f.d1;
    m = g2 * (Eigen::MatrixXd::Identity(d, d) - xhat * xhat.transpose());
    return m;
}

Jet4 weight_jet(double f, const WeightParams& p) {
    if (f < 0.0) throw std::domain_error("weight_jet: f must be >= 0");
    if (p.delta <= 0.0) throw std::domain_error("weight_jet: delta must be > 0");
    if (p.nu < 0) throw std::domain_error("weight_jet: nu must be >= 0");
    const double scale = std::ldexp(1.0, -p.nu);  // 2^{-nu}
    const double y = 1.0 + f * scale;
    const double del = p.delta;
    Jet4 j;
    j.v = (1.0 - std::pow(y, -del)) / del;
    j.d1 = std::pow(y, -1.0 - del) * scale;
    j.d2 = -(1.0 + del) * std::pow(y, -2.0 - del) * scale * scale;
    j.d3 = (1.0 + del) * (2.0 + del) * std::pow(y, -3.0 - del) * scale * scale * scale;
    return j;
}

}  // namespace repscat
