#pragma once

#include "repscat/grid.hpp"
#include "repscat/hamiltonian.hpp"
#include "repscat/phase.hpp"

namespace repscat {

// Outgoing/incoming model eigenfunctions
//   phi^s[v] = (2 pi)^{-1/2} exp(-s i pi/4 C) r^{-(d+alpha/2-1)/2}
//              e^{s i theta} v(s omega),   C = (d+alpha/2-1)/(1+alpha/2),
// carried on the grid with a smooth low-f cutoff (support f >= 2^mc) so the
// source (H - lambda) phi^s[v] is square integrable near the origin.  The
// cutoff changes nothing asymptotic: the adjoint wave-matrix identity is
// insensitive to compact modifications of phi.
//
// Angular data per channel: d = 1 carries a two-slot vector indexed by
// omega = +1, -1; partial-wave channels (d >= 2) carry one slot each.

struct Incident {
    WaveField phi;        // cutoff model eigenfunction
    WaveField psi;        // (H - lambda) phi from the closed form
    double route_disagreement = 0.0;  // closed form vs discrete H, relative
    ShellNorms psi_norms;
};

/// Number of angular slots a channel carries (2 for d = 1, else 1).
int angular_slots(const PotentialSpec& spec);

/// Model-eigenfunction prefactor (2 pi)^{-1/2} exp(-s i pi/4 C).
Complex incident_prefactor(const PotentialSpec& spec, int sign);

/// Trace prefactor (2 pi)^{-1/2} exp(s i pi/4 B), B = (d-alpha/2-3)/(1+alpha/2).
Complex trace_prefactor(const PotentialSpec& spec, int sign);

/// Extraction constant c_s = sqrt(2 pi) exp(s i pi/4 C).
Complex extraction_constant(const PotentialSpec& spec, int sign);

/// Builds phi^s[v] and its source on the channel grid.  v has angular_slots
/// entries for d = 1; for d >= 2 it is the single coefficient of the channel.
/// mc is the dyadic cutoff index (support f >= 2^mc, mc >= 2).
Incident build_incident(const ChannelOperator& op, double lambda, int sign,
                        const Eigen::VectorXcd& v, int mc);

/// Envelope of the source beyond the cutoff transition: the full value is
/// envelope * e^{i sign theta(lambda, t)}.  The source decays only
/// polynomially, so resolvent solves against it must account for the part
/// beyond the truncation radius (see SolveOptions::tail_envelope).
Complex incident_source_envelope(const ChannelOperator& op, double lambda,
                                 int sign, const Eigen::VectorXcd& v, double t,
                                 bool right_side);

}  // namespace repscat
