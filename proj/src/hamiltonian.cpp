#include "repscat/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace repscat {

namespace {

Eigen::VectorXd central_second(int order) {
    switch (order) {
        case 2: {
            Eigen::VectorXd w(3);
            w << 1.0, -2.0, 1.0;
            return w;
        }
        case 4: {
            Eigen::VectorXd w(5);
            w << -1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12;
            return w;
        }
        case 6: {
            Eigen::VectorXd w(7);
            w << 1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20,
                1.0 / 90;
            return w;
        }
        case 8: {
            Eigen::VectorXd w(9);
            w << -1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72, 8.0 / 5,
                -1.0 / 5, 8.0 / 315, -1.0 / 560;
            return w;
        }
        default:
            throw std::invalid_argument("central_second: unsupported order");
    }
}

}  // namespace

ChannelOperator::ChannelOperator(GridPtr grid, Channel channel,
                                 std::function<double(double)> potential_override)
    : grid_(std::move(grid)), channel_(channel),
      potential_override_(std::move(potential_override)) {
    const ChannelGrid& g = *grid_;
    const int order = g.params().order;
    hw_ = order / 2;
    stencil2_ = central_second(order);

    const int n = g.size();
    U0_.resize(n);
    inv_sigma2_.resize(n);
    for (int i = 0; i < n; ++i) {
        const double s = g.sigma()(i);
        const double s1 = g.dsigma()(i);
        const double s2 = g.d2sigma()(i);
        const double gamma = 0.75 * s1 * s1 / s - 0.5 * s2;
        U0_(i) = potential(g.t()(i)) / (s * s) - 0.5 * gamma / (s * s * s);
        inv_sigma2_(i) = 1.0 / (s * s);
    }

    // Skewed full-order rows over a (order+1)-node lattice window, one row
    // per evaluation position.  Used near the grid ends; on half-line grids
    // the window includes the origin lattice point whose value is the known
    // Dirichlet zero.
    const int width = order + 1;
    Eigen::VectorXd taus(width);
    for (int k = 0; k < width; ++k) taus(k) = k;
    edge2_lo_.resize(width, width);
    edge2_hi_.resize(width, width);
    for (int j = 0; j < width; ++j) {
        edge2_lo_.row(j) = fornberg_weights(j, taus, 2).transpose();
        edge2_hi_.row(j) = fornberg_weights(width - 1 - j, taus, 2).transpose();
    }
    dbound_lo_ = fornberg_weights(0.0, taus, 1);
    dbound_hi_ = fornberg_weights(width - 1, taus, 1);
}

double ChannelOperator::potential(double t) const {
    if (potential_override_) return potential_override_(t);
    const PotentialSpec& spec = grid_->spec();
    const double c = channel_.coefficient(spec.d);
    double v = spec.potential(t);
    if (c != 0.0) v += 0.5 * c / (t * t);
    return v;
}

// Second-derivative row for grid node i as (grid index, weight) pairs.
// Lattice position p = i + 1 on half-line grids (lattice 0 = origin node
// with w = 0, dropped from the output).
void ChannelOperator::second_derivative_row(
    int i, std::vector<std::pair<int, double>>& out) const {
    out.clear();
    const ChannelGrid& g = *grid_;
    const int n = g.size();
    const int off = g.full_line() ? 0 : 1;
    const int p = i + off;
    const int p_max = n - 1 + off;
    const int width = static_cast<int>(stencil2_.size());

    auto push = [&](int lattice, double wgt) {
        const int j = lattice - off;
        if (j >= 0) out.emplace_back(j, wgt);
    };

    if (p >= hw_ && p <= p_max - hw_) {
        for (int k = 0; k < width; ++k) push(p - hw_ + k, stencil2_(k));
    } else if (p < hw_) {
        for (int k = 0; k < width; ++k) push(k, edge2_lo_(p, k));
    } else {
        const int lo = p_max - (width - 1);
        for (int k = 0; k < width; ++k)
            push(lo + k, edge2_hi_(p_max - p, k));
    }
}

Eigen::VectorXcd ChannelOperator::apply(const Eigen::VectorXcd& u) const {
    const ChannelGrid& g = *grid_;
    const int n = g.size();
    const double idt2 = 1.0 / (g.dtau() * g.dtau());
    Eigen::VectorXcd wv(n);
    for (int i = 0; i < n; ++i) wv(i) = std::sqrt(g.sigma()(i)) * u(i);
    Eigen::VectorXcd out(n);
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < n; ++i) {
        second_derivative_row(i, row);
        std::complex<double> lap = 0.0;
        for (const auto& [j, wgt] : row) lap += wgt * wv(j);
        lap *= idt2;
        out(i) = std::pow(g.sigma()(i), 1.5) * (-0.5 * lap + U0_(i) * wv(i));
    }
    return out;
}

double ChannelOperator::hermiticity_defect(const Eigen::VectorXcd& u,
                                           const Eigen::VectorXcd& v) const {
    const ChannelGrid& g = *grid_;
    const Eigen::VectorXcd Hu = apply(u), Hv = apply(v);
    std::complex<double> a = 0.0, b = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        a += std::conj(u(i)) * Hv(i) * g.weight()(i);
        b += std::conj(Hu(i)) * v(i) * g.weight()(i);
    }
    return std::abs(a - b);
}

BandedMatrix ChannelOperator::assemble(std::complex<double> z,
                                       const ClosureValues& bc) const {
    const ChannelGrid& g = *grid_;
    const int n = g.size();
    const int order = g.params().order;
    const int reach = order;  // skewed rows reach this far
    BandedMatrix m(n, reach, reach);
    const double idt2 = 1.0 / (g.dtau() * g.dtau());

    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < n; ++i) {
        second_derivative_row(i, row);
        for (const auto& [j, wgt] : row) m.add(i, j, -0.5 * wgt * idt2);
        std::complex<double> diag = U0_(i) - z * inv_sigma2_(i);
        if (bc.kind == ClosureKind::absorber && !g.physical(i)) {
            const double len = g.L_actual() - g.params().L;
            const double xi = (g.t()(i) - g.params().L) / std::max(len, 1e-12);
            const double s = g.sigma()(i);
            diag += std::complex<double>(0.0,
                                         -bc.absorber_strength * s * s * xi * xi * xi) *
                    inv_sigma2_(i);
        }
        m.add(i, i, diag);
    }

    auto clear_row = [&](int i) {
        for (int j = std::max(0, i - reach); j <= std::min(n - 1, i + reach); ++j)
            m.at(i, j) = 0.0;
    };
    auto dirichlet_row = [&](int i) {
        clear_row(i);
        m.at(i, i) = 1.0;
    };
    auto dtn_row = [&](int i, bool right, std::complex<double> kappa) {
        // u'/u = kappa in x  =>  w_tau = (kappa/sigma + sigma'_x/(2 sigma^2)) w
        const double sg = g.x()(i) >= 0.0 ? 1.0 : -1.0;
        const double sx = sg * g.dsigma()(i);
        const std::complex<double> c =
            kappa / g.sigma()(i) + 0.5 * sx / (g.sigma()(i) * g.sigma()(i));
        clear_row(i);
        const int width = static_cast<int>(dbound_hi_.size());
        if (right) {
            const int lo = n - width;
            for (int k = 0; k < width; ++k)
                m.add(i, lo + k, dbound_hi_(k) / g.dtau());
        } else {
            for (int k = 0; k < width; ++k) m.add(i, k, dbound_lo_(k) / g.dtau());
        }
        m.add(i, i, -c);
    };

    switch (bc.kind) {
        case ClosureKind::dirichlet:
        case ClosureKind::absorber:
            dirichlet_row(n - 1);
            if (g.full_line()) dirichlet_row(0);
            break;
        case ClosureKind::impedance:
        case ClosureKind::wkb_dtn:
            dtn_row(n - 1, true, bc.kappa_right);
            if (g.full_line()) dtn_row(0, false, bc.kappa_left);
            break;
    }
    return m;
}

Eigen::VectorXcd ChannelOperator::rhs_from(const Eigen::VectorXcd& psi) const {
    const ChannelGrid& g = *grid_;
    Eigen::VectorXcd r(g.size());
    for (int i = 0; i < g.size(); ++i)
        r(i) = psi(i) * std::pow(g.sigma()(i), -1.5);
    return r;
}

Eigen::VectorXcd ChannelOperator::field_from(const Eigen::VectorXcd& w) const {
    const ChannelGrid& g = *grid_;
    Eigen::VectorXcd u(g.size());
    for (int i = 0; i < g.size(); ++i) u(i) = w(i) / std::sqrt(g.sigma()(i));
    return u;
}

}  // namespace repscat
