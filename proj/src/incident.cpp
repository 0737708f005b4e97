#include "repscat/incident.hpp"

#include <cmath>

#include "repscat/geometry.hpp"

namespace repscat {

int angular_slots(const PotentialSpec& spec) { return spec.d == 1 ? 2 : 1; }

Complex incident_prefactor(const PotentialSpec& spec, int sign) {
    const double C = (spec.d + 0.5 * spec.alpha - 1.0) / (1.0 + 0.5 * spec.alpha);
    return std::polar(1.0 / std::sqrt(2.0 * M_PI),
                      -sign * 0.25 * M_PI * C);
}

Complex trace_prefactor(const PotentialSpec& spec, int sign) {
    const double B = (spec.d - 0.5 * spec.alpha - 3.0) / (1.0 + 0.5 * spec.alpha);
    return std::polar(1.0 / std::sqrt(2.0 * M_PI), sign * 0.25 * M_PI * B);
}

Complex extraction_constant(const PotentialSpec& spec, int sign) {
    const double C = (spec.d + 0.5 * spec.alpha - 1.0) / (1.0 + 0.5 * spec.alpha);
    return std::polar(std::sqrt(2.0 * M_PI), sign * 0.25 * M_PI * C);
}

namespace {

// slot value v(s omega) on a side of the line (or the parity-signed channel
// coefficient for partial waves)
Complex slot_value(const PotentialSpec& spec, int ell, int sign,
                   const Eigen::VectorXcd& v, bool right_side) {
    if (spec.d == 1) {
        const int side = right_side ? 0 : 1;  // slot 0 <-> omega = +1
        return sign >= 0 ? v(side) : v(1 - side);
    }
    const double parity = (sign < 0 && (ell % 2)) ? -1.0 : 1.0;
    return parity * v(0);
}

// source bracket of the uncut model eigenfunction (valid for f > 4):
// lambda^2 t^-a/2 + q + s i (a lambda / 2) t^{-a/2-1}
//   + (c_ell/2 - a/8 - a^2/32) t^-2
Complex source_bracket(const PotentialSpec& spec, double c_ell, double lambda,
                       int sign, double t) {
    const double a = spec.alpha;
    return 0.5 * lambda * lambda * std::pow(t, -a) + spec.q(t) +
           Complex(0.0, 1.0) * static_cast<double>(sign) * 0.5 * a * lambda *
               std::pow(t, -0.5 * a - 1.0) +
           (0.5 * c_ell - a / 8.0 - a * a / 32.0) / (t * t);
}

}  // namespace

Complex incident_source_envelope(const ChannelOperator& op, double lambda,
                                 int sign, const Eigen::VectorXcd& v, double t,
                                 bool right_side) {
    const PotentialSpec& spec = op.grid().spec();
    const double c_ell = op.channel().coefficient(spec.d);
    const Complex vslot = slot_value(spec, op.channel().ell, sign, v, right_side);
    return incident_prefactor(spec, sign) * std::pow(t, -0.25 * spec.alpha) *
           source_bracket(spec, c_ell, lambda, sign, t) * vslot;
}

Incident build_incident(const ChannelOperator& op, double lambda, int sign,
                        const Eigen::VectorXcd& v, int mc) {
    const ChannelGrid& g = op.grid();
    const PotentialSpec& spec = g.spec();
    if (mc < 1)
        throw std::invalid_argument("build_incident: cutoff index must be >= 1");
    if (v.size() != angular_slots(spec))
        throw std::invalid_argument("build_incident: wrong angular dimension");

    const Complex pref = incident_prefactor(spec, sign);
    const double scale = std::ldexp(1.0, mc);
    const double c_ell = op.channel().coefficient(spec.d);

    Incident out;
    out.phi = WaveField::zero(op.grid_ptr());
    out.psi = WaveField::zero(op.grid_ptr());
    const Complex i1(0.0, 1.0);

    for (int i = 0; i < g.size(); ++i) {
        const double t = g.t()(i);
        const double f = g.f()(i);
        const Jet4 cj = cutoff_jet(f / scale);
        const double c = 1.0 - cj.v;  // rises across f in [2^mc, 2^{mc+1}]
        if (c == 0.0) continue;

        const Complex vslot =
            slot_value(spec, op.channel().ell, sign, v, g.x()(i) >= 0.0);
        const double th = eikonal_phase(spec.alpha, lambda, t).v;
        const Complex osc = std::exp(Complex(0.0, sign >= 0 ? th : -th));
        const Complex phi0 = pref * std::pow(t, -0.25 * spec.alpha) * osc * vslot;
        const Complex g0 = phi0 * source_bracket(spec, c_ell, lambda, sign, t);

        if (cj.v == 0.0) {
            out.phi.values(i) = phi0;
            out.psi.values(i) = g0;
            continue;
        }
        // cutoff commutator: (H-l)(c phi0) = c g0 - 1/2 c'' phi0 - c' phi0'
        const GeometryJet gj = geometry_jet(spec.alpha, spec.d, t);
        const double cprime = -cj.d1 * gj.f.d1 / scale;
        const double csecond = -(cj.d2 * gj.f.d1 * gj.f.d1 / (scale * scale) +
                                 cj.d1 * gj.f.d2 / scale);
        const Complex dlog =
            -0.25 * spec.alpha / t +
            i1 * static_cast<double>(sign) * eikonal_phase(spec.alpha, lambda, t).dt;
        out.phi.values(i) = c * phi0;
        out.psi.values(i) =
            c * g0 - 0.5 * csecond * phi0 - cprime * dlog * phi0;
    }

    // independent route: apply the discrete Hamiltonian to the gridded field
    Eigen::VectorXcd hphi = op.apply(out.phi.values);
    double num = 0.0, den = 0.0;
    const int skip = 3 * op.boundary_halfwidth();
    for (int i = skip; i < g.size() - skip; ++i) {
        if (!g.physical(i)) continue;
        num += std::norm(hphi(i) - lambda * out.phi.values(i) -
                         out.psi.values(i)) *
               g.weight()(i);
        den += std::norm(out.psi.values(i)) * g.weight()(i);
    }
    out.route_disagreement = std::sqrt(num / std::max(den, 1e-300));
    out.psi_norms = shell_norms(out.psi);
    return out;
}

}  // namespace repscat
