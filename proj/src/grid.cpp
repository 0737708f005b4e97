#include "repscat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "repscat/extrapolate.hpp"
#include "repscat/geometry.hpp"
#include "repscat/quadrature.hpp"

namespace repscat {

namespace {

// Mesh density and its first two derivatives in x >= 0.  The density is an
// analytic stand-in for the local momentum: sqrt(2 lambda + (c^2 + t^2)^{a/2})
// matches sqrt(2 lambda + t^alpha) at infinity but has bounded derivatives of
// every order, which keeps the mapped stencil error at the nominal order.
struct SigmaJet {
    double v, d1, d2;
};

struct SigmaProfile {
    double alpha;
    double two_lambda;   // 2 * lambda_ref (floored away from zero)
    double core = 2.0;   // analytic smoothing scale of the density
    double boost = 0.0;  // origin refinement amplitude
    double width = 1.0;

    SigmaJet eval(double t) const {
        const double u = core * core + t * t;
        const double A = two_lambda + std::pow(u, 0.5 * alpha);
        const double dA = alpha * t * std::pow(u, 0.5 * alpha - 1.0);
        const double d2A =
            alpha * std::pow(u, 0.5 * alpha - 2.0) * (u + (alpha - 2.0) * t * t);
        const double s = std::sqrt(A);
        const double ds = 0.5 * dA / s;
        const double d2s = 0.5 * d2A / s - 0.25 * dA * dA / (A * s);
        if (boost == 0.0) return {s, ds, d2s};
        const double y = t / width;
        const double g = std::exp(-y * y);
        const double b = 1.0 + boost * g;
        const double db = boost * g * (-2.0 * t / (width * width));
        const double d2b = boost * g * (4.0 * t * t / std::pow(width, 4) - 2.0 / (width * width));
        return {s * b, ds * b + s * db, d2s * b + 2.0 * ds * db + s * d2b};
    }
};

// One mesh step: advance from t by solving integral(sigma, t, t+h) = dtau.
double advance_node(const SigmaProfile& sp, double t, double dtau) {
    auto dens = [&](double s) { return sp.eval(s).v; };
    double h = dtau / sp.eval(t).v;
    for (int it = 0; it < 8; ++it) {
        const double q = integrate(dens, t, t + h, 1e-14, 6);
        const double g = q - dtau;
        const double slope = sp.eval(t + h).v;
        const double step = g / slope;
        h -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, h)) break;
    }
    return t + h;
}

}  // namespace

Eigen::VectorXd fornberg_weights(double x0, const Eigen::VectorXd& nodes, int m) {
    const int n = static_cast<int>(nodes.size()) - 1;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n + 1, m + 1);
    double c1 = 1.0;
    double c4 = nodes(0) - x0;
    c(0, 0) = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes(i) - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes(i) - nodes(j);
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
                c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
            c(j, 0) = c4 * c(j, 0) / c3;
        }
        c1 = c2;
    }
    return c.col(m);
}

ChannelGrid::ChannelGrid(const PotentialSpec& spec, const GridParams& params)
    : spec_(spec), params_(params) {
    if (params.L < 4.0)
        throw std::invalid_argument("ChannelGrid: L must be at least 4");
    if (params.order != 2 && params.order != 4 && params.order != 6 &&
        params.order != 8)
        throw std::invalid_argument("ChannelGrid: order must be 2, 4, 6 or 8");
    if (params.ppw < 4.0)
        throw std::invalid_argument("ChannelGrid: points per wavelength too small");

    full_line_ = (spec.d == 1);
    dtau_ = 2.0 * M_PI / params.ppw;

    SigmaProfile sp;
    sp.alpha = spec.alpha;
    sp.two_lambda = 2.0 * std::max(params.lambda_ref, 0.05);
    sp.width = params.origin_width;
    if (params.origin_spacing > 0.0) {
        const double s0 = sp.eval(0.0).v;
        sp.boost = std::max(0.0, dtau_ / (params.origin_spacing * s0) - 1.0);
    }

    const double budget = estimate_node_count(spec, params);
    const double total_budget = full_line_ ? 2.0 * budget : budget;
    if (total_budget > static_cast<double>(params.max_nodes))
        throw std::runtime_error(
            "ChannelGrid: estimated node count exceeds the configured budget");

    const double L_total = params.L * (1.0 + std::max(0.0, params.pad_fraction));
    std::vector<double> pos;  // nodes with x > 0
    double t = 0.0;
    while (t < L_total) {
        t = advance_node(sp, t, dtau_);
        pos.push_back(t);
        if (static_cast<std::int64_t>(pos.size()) > params.max_nodes)
            throw std::runtime_error("ChannelGrid: node budget exceeded");
    }
    const int np = static_cast<int>(pos.size());
    L_actual_ = pos.back();

    int n;
    if (full_line_) {
        n = 2 * np + 1;
        x_.resize(n);
        for (int i = 0; i < np; ++i) x_(i) = -pos[np - 1 - i];
        x_(np) = 0.0;
        for (int i = 0; i < np; ++i) x_(np + 1 + i) = pos[i];
    } else {
        n = np;  // origin excluded: Dirichlet node at r = 0
        x_ = Eigen::Map<Eigen::VectorXd>(pos.data(), np);
    }

    t_ = x_.cwiseAbs();
    sigma_.resize(n);
    dsigma_.resize(n);
    d2sigma_.resize(n);
    f_.resize(n);
    for (int i = 0; i < n; ++i) {
        const SigmaJet sj = sp.eval(t_(i));
        sigma_(i) = sj.v;
        dsigma_(i) = sj.d1;
        d2sigma_(i) = sj.d2;
        f_(i) = escape_function(spec.alpha, t_(i));
    }

    // Trapezoid quadrature for integrals in dr = dtau / sigma.
    w_.setZero(n);
    for (int i = 0; i < n; ++i) w_(i) = dtau_ / sigma_(i);
    w_(0) *= 0.5;
    w_(n - 1) *= 0.5;
    if (!full_line_) w_(0) += 0.5 * x_(0);  // segment down to the origin node

    // Pad bookkeeping (absorber region beyond the physical L).  On full-line
    // grids the pad sits at both ends; nodes with |x| <= L are physical.
    has_pad_ = params.pad_fraction > 0.0;
    physical_.assign(n, 1);
    if (has_pad_) {
        for (int i = 0; i < n; ++i) physical_[i] = (t_(i) <= params.L) ? 1 : 0;
    }

    // Dyadic shells over physical nodes.
    int nmax = 0;
    for (int i = 0; i < n; ++i)
        if (physical_[i])
            nmax = std::max(nmax, static_cast<int>(std::floor(std::log2(f_(i)))));
    shells_.assign(nmax + 1, {});
    for (int i = 0; i < n; ++i) {
        if (!physical_[i]) continue;
        const int s = static_cast<int>(std::floor(std::log2(f_(i))));
        if (s >= 0 && s <= nmax) shells_[s].push_back(i);
    }
    const double f_max =
        escape_function(spec.alpha, has_pad_ ? params.L : L_actual_);
    complete_shells_ = static_cast<int>(std::floor(std::log2(f_max)));

    for (int i = 0; i < n; ++i) {
        if (x_(i) > 0.0) right_.push_back(i);
        if (x_(i) < 0.0) left_.push_back(i);
    }
    if (!full_line_) left_ = right_;
}

int ChannelGrid::node_near_f(double f_value) const {
    int best = -1;
    double gap = 1e300;
    for (int i : right_) {
        if (!physical(i)) continue;
        const double g = std::abs(f_(i) - f_value);
        if (g < gap) {
            gap = g;
            best = i;
        }
    }
    if (best < 0) throw std::invalid_argument("node_near_f: empty grid");
    return best;
}

GridPtr build_grid(const PotentialSpec& spec, const GridParams& params) {
    return std::make_shared<const ChannelGrid>(spec, params);
}

double estimate_node_count(const PotentialSpec& spec, const GridParams& params) {
    const double two_lambda = 2.0 * std::max(params.lambda_ref, 0.05);
    SigmaProfile sp;
    sp.alpha = spec.alpha;
    sp.two_lambda = two_lambda;
    auto dens = [&](double t) { return sp.eval(t).v; };
    const double tau = integrate(dens, 0.0, params.L, 1e-8);
    return tau * params.ppw / (2.0 * M_PI);
}

WaveField WaveField::zero(const GridPtr& g) {
    return WaveField(g, Eigen::VectorXcd::Zero(g->size()));
}

ShellNorms shell_norms(const WaveField& u) {
    const ChannelGrid& g = *u.grid;
    ShellNorms out;
    out.profile.resize(g.shell_count(), 0.0);
    for (int n = 0; n < g.shell_count(); ++n) {
        double acc = 0.0;
        for (int i : g.shell(n)) acc += std::norm(u.values(i)) * g.weight()(i);
        const double nrm = std::sqrt(acc);
        out.B += nrm * std::pow(2.0, 0.5 * n);
        out.profile[n] = nrm * std::pow(2.0, -0.5 * n);
        out.Bstar = std::max(out.Bstar, out.profile[n]);
    }
    return out;
}

std::complex<double> inner(const WaveField& a, const WaveField& b) {
    const ChannelGrid& g = *a.grid;
    std::complex<double> acc = 0.0;
    for (int i = 0; i < g.size(); ++i)
        if (g.physical(i))
            acc += std::conj(a.values(i)) * b.values(i) * g.weight()(i);
    return acc;
}

double norm_l2(const WaveField& a) { return std::sqrt(std::abs(inner(a, a).real())); }

double norm_weighted(const WaveField& a, double s) {
    const ChannelGrid& g = *a.grid;
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i)
        if (g.physical(i))
            acc += std::pow(g.f()(i), 2.0 * s) * std::norm(a.values(i)) * g.weight()(i);
    return std::sqrt(acc);
}

double profile_slope(const std::vector<double>& profile) {
    std::vector<double> x, y;
    for (size_t n = 0; n < profile.size(); ++n) {
        if (profile[n] > 0.0) {
            x.push_back(static_cast<double>(n));
            y.push_back(std::log2(profile[n]));
        }
    }
    return fit_slope(x, y).slope;
}

}  // namespace repscat
