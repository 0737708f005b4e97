#include "repscat/resolvent.hpp"

#include <cmath>

#include "repscat/geometry.hpp"
#include "repscat/quadrature.hpp"

namespace repscat {

ResolventSolver::ResolventSolver(GridPtr grid, Channel channel, PhaseContext ctx)
    : grid_(std::move(grid)), channel_(channel), ctx_(ctx),
      op_(std::make_shared<ChannelOperator>(grid_, channel)) {}

ClosureValues ResolventSolver::closure_values(Complex z, int sign,
                                              ClosureKind kind,
                                              double absorber_strength) const {
    ClosureValues bc;
    bc.kind = kind;
    bc.absorber_strength = absorber_strength;
    if (kind == ClosureKind::dirichlet || kind == ClosureKind::absorber)
        return bc;

    const ChannelGrid& g = *grid_;
    const double tL = g.t()(g.size() - 1);
    if (kind == ClosureKind::wkb_dtn) {
        const TailWkb w(g.spec(), channel_, z, sign);
        bc.kappa_right = w.log_derivative(tL);
    } else {
        // impedance closure from the complex asymptotic phase:
        //   u'/u = i r^{a/2} (s a_z + i/2 lap f) + (d-1)/(2 t)
        const PotentialSpec& spec = g.spec();
        const GeometryJet gj = geometry_jet(spec.alpha, spec.d, tL);
        const Complex a = phase_a(z, tL, sign, spec, ctx_);
        const double lap_f = gj.lap_f;
        const Complex i(0.0, 1.0);
        bc.kappa_right = i * std::pow(tL, 0.5 * spec.alpha) *
                             (static_cast<double>(sign) * a + 0.5 * i * lap_f) +
                         0.5 * (spec.d - 1) / tL;
    }
    bc.kappa_left = -bc.kappa_right;  // mirrored outgoing wave on the left end
    return bc;
}

std::shared_ptr<BandedMatrix> ResolventSolver::factorized(
    Complex z, int sign, const SolveOptions& opts) {
    const Key key{z.real(), z.imag(),
                  static_cast<int>(opts.closure) * 4 + (sign >= 0 ? 1 : 0)};
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const ClosureValues bc =
        closure_values(z, sign, opts.closure, opts.absorber_strength);
    auto m = std::make_shared<BandedMatrix>(op_->assemble(z, bc));
    m->factorize();
    if (cache_.size() > 24) cache_.clear();
    cache_[key] = m;
    return m;
}

Complex ResolventSolver::tail_closure_term(double lambda, int sign,
                                           const SolveOptions& opts,
                                           bool right_side) const {
    const ChannelGrid& g = *grid_;
    const double L = g.t()(g.size() - 1);
    const TailWkb ref(g.spec(), channel_, Complex(lambda, 0.0), sign);
    const double drift_L = ref.drift_phase(L);

    auto envelope_w = [&](double y) {
        // radiating reference without the fast e^{i s theta} factor
        const Complex w1 = ref.k(y) + ref.delta2(y);
        const Complex amp = 1.0 / std::sqrt(w1);
        const double dr = ref.drift_phase(y);
        const Complex ph = std::polar(1.0, sign >= 0 ? dr : -dr);
        return amp * ph;
    };

    Complex I(0.0, 0.0);
    const double sg = sign >= 0 ? 1.0 : -1.0;
    if (opts.tail_sign != sign) {
        // opposite phases cancel: smooth decaying integrand
        auto f = [&](double y) {
            return envelope_w(y) * opts.tail_envelope(y, right_side);
        };
        I = integrate_tail_c(f, L, 1e-13);
    } else {
        // equal phases add: integral of E P e^{i s (theta + theta-tilde)},
        // shrunk by two integrations by parts against the fast phase
        auto envelope = [&](double y) {
            const Complex w1 = ref.k(y) + ref.delta2(y);
            return opts.tail_envelope(y, right_side) / std::sqrt(w1);
        };
        auto rate = [&](double y) {
            return sg * (eikonal_phase_dr(g.spec().alpha, lambda, y) +
                         (ref.k(y) + ref.delta2(y)).real());
        };
        auto transported = [&](double y) {
            return envelope(y) / (Complex(0.0, 1.0) * rate(y));
        };
        const double h = 1e-3 * L;
        auto d_transported = [&](double y) {
            return (transported(y + h) - transported(y - h)) / (2.0 * h);
        };
        const Complex term1 = -transported(L);
        const Complex term2 = d_transported(L) / (Complex(0.0, 1.0) * rate(L));
        const double thL = eikonal_phase(g.spec().alpha, lambda, L).v;
        I = (term1 + term2) * std::polar(1.0, sg * (2.0 * thL + drift_L));
    }
    const double thL = eikonal_phase(g.spec().alpha, lambda, L).v;
    const Complex wL = envelope_w(L) * std::polar(1.0, sg * thL);
    return 2.0 * I / wL;
}

ResolventResult ResolventSolver::solve(const SpectralPoint& zp,
                                       const WaveField& psi,
                                       const SolveOptions& opts) {
    const ChannelGrid& g = *grid_;
    const Complex z = zp.z();
    if (zp.eps == 0.0 && (opts.closure == ClosureKind::dirichlet))
        throw std::invalid_argument(
            "solve: eps = 0 needs a radiating or absorbing closure");
    if (opts.closure == ClosureKind::absorber && !g.has_pad())
        throw std::invalid_argument("solve: absorber closure needs a padded grid");

    auto m = factorized(z, zp.sign, opts);
    Eigen::VectorXcd rhs = op_->rhs_from(psi.values);
    rhs(g.size() - 1) = 0.0;  // closure row
    if (g.full_line()) rhs(0) = 0.0;
    if (opts.tail_envelope && zp.eps == 0.0 &&
        (opts.closure == ClosureKind::impedance ||
         opts.closure == ClosureKind::wkb_dtn)) {
        const int n = g.size();
        const Complex b_right =
            tail_closure_term(zp.lambda, zp.sign, opts, true);
        rhs(n - 1) = b_right / std::sqrt(g.sigma()(n - 1));
        if (g.full_line()) {
            const Complex b_left =
                tail_closure_term(zp.lambda, zp.sign, opts, false);
            // mirrored end: u' - kappa_left u |_{-L} = -b_mirror
            rhs(0) = -b_left / std::sqrt(g.sigma()(0));
        }
    }
    const Eigen::VectorXcd w = m->solve(rhs);

    ResolventResult res;
    res.u = WaveField(grid_, op_->field_from(w));

    // interior defining-equation residual
    const Eigen::VectorXcd hu = op_->apply(res.u.values);
    const int skip = 2 * op_->boundary_halfwidth() + 2;
    double num = 0.0, den = 0.0;
    for (int i = skip; i < g.size() - skip; ++i) {
        if (!g.physical(i)) continue;
        num += std::norm(hu(i) - z * res.u.values(i) - psi.values(i)) *
               g.weight()(i);
        den += std::norm(psi.values(i)) * g.weight()(i);
    }
    res.solver_residual = std::sqrt(num / std::max(den, 1e-300));

    // closure consistency a few nodes inward of the truncation
    if (opts.closure == ClosureKind::impedance ||
        opts.closure == ClosureKind::wkb_dtn) {
        const Eigen::VectorXcd du = grid_derivative(g, res.u.values);
        const int j = g.size() - 1 - 3 * op_->boundary_halfwidth();
        const ClosureValues bcj =
            closure_values(z, zp.sign, opts.closure, opts.absorber_strength);
        // evaluate the closure's logarithmic derivative at the probe radius
        Complex kappa_j;
        if (opts.closure == ClosureKind::wkb_dtn) {
            kappa_j = TailWkb(g.spec(), channel_, z, zp.sign)
                          .log_derivative(g.t()(j));
        } else {
            const PotentialSpec& spec = g.spec();
            const GeometryJet gj = geometry_jet(spec.alpha, spec.d, g.t()(j));
            const Complex a = phase_a(z, g.t()(j), zp.sign, spec, ctx_);
            const Complex i(0.0, 1.0);
            kappa_j = i * std::pow(g.t()(j), 0.5 * spec.alpha) *
                          (static_cast<double>(zp.sign) * a + 0.5 * i * gj.lap_f) +
                      0.5 * (spec.d - 1) / g.t()(j);
        }
        const double scale = res.u.values.cwiseAbs().maxCoeff();
        res.boundary_residual =
            std::abs(du(j) - kappa_j * res.u.values(j)) /
            std::max(scale * std::abs(kappa_j), 1e-300);
        (void)bcj;
    }
    return res;
}

LimitingResult ResolventSolver::limiting(double lambda, int sign,
                                         const WaveField& psi,
                                         const SolveOptions& opts, double eps0,
                                         int halvings, double flag_tol) {
    LimitingResult out;
    out.direct = solve({lambda, 0.0, sign}, psi, opts);

    // route (a): eps ladder with componentwise Richardson (orders 1, 2, 3)
    std::vector<Eigen::VectorXcd> fields;
    std::vector<double> epss;
    for (int k = 0; k <= halvings; ++k) {
        const double eps = eps0 * std::pow(0.5, k);
        epss.push_back(eps);
        fields.push_back(solve({lambda, eps, sign}, psi, opts).u.values);
    }
    const int n = grid_->size();
    const int levels = 3;
    std::vector<Eigen::VectorXcd> col = fields;
    for (int k = 1; k <= levels; ++k) {
        const double w = std::pow(2.0, k);  // error terms eps^k halve k-fold
        std::vector<Eigen::VectorXcd> next(col.size() - 1);
        for (size_t j = 0; j + 1 < col.size(); ++j)
            next[j] = (w * col[j + 1] - col[j]) / (w - 1.0);
        col.swap(next);
    }
    out.extrapolated = WaveField(grid_, col.back());

    // ladder record on a tracked norm
    std::vector<Complex> norms;
    for (const auto& fvec : fields)
        norms.push_back(norm_l2(WaveField(grid_, fvec)));
    out.record = richardson(norms, {1.0, 2.0, 3.0});
    out.record.params = epss;

    // cross-route comparison in the Bstar norm
    WaveField diff(grid_, out.extrapolated.values - out.direct.u.values);
    const double denom = shell_norms(out.direct.u).Bstar;
    out.route_discrepancy = shell_norms(diff).Bstar / std::max(denom, 1e-300);
    if (out.route_discrepancy > flag_tol) {
        out.flagged = true;
        out.flag_reason = "eps-extrapolated and direct routes disagree";
    }
    (void)n;

    // Hoelder continuity along the ladder in the weighted norm (s = 1)
    std::vector<double> lx, ly;
    for (size_t i = 0; i + 1 < fields.size(); ++i) {
        WaveField d(grid_, fields[i] - fields[i + 1]);
        const double gap = std::abs(epss[i] - epss[i + 1]);
        const double val = norm_weighted(d, -1.0);
        if (val > 0.0) {
            lx.push_back(std::log(gap));
            ly.push_back(std::log(val));
        }
    }
    out.hoelder_exponent = fit_slope(lx, ly).slope;
    return out;
}

LapReport ResolventSolver::lap_diagnostic(double lambda, const WaveField& psi,
                                          double eps0, int halvings,
                                          double eps_min) {
    LapReport rep;
    const PotentialSpec& spec = grid_->spec();
    const double psi_B = shell_norms(psi).B;
    SolveOptions opts;
    std::vector<Eigen::VectorXcd> fields;
    for (int k = 0; k <= halvings; ++k) {
        const double eps = std::max(eps0 * std::pow(0.5, k), eps_min);
        rep.eps.push_back(eps);
        const ResolventResult r = solve({lambda, eps, +1}, psi, opts);
        fields.push_back(r.u.values);
        const WaveField& u = r.u;
        std::array<double, 4> q{};
        q[0] = shell_norms(u).Bstar / psi_B;
        q[1] = shell_norms(WaveField(grid_, apply_pf(*grid_, u.values))).Bstar /
               psi_B;
        q[2] = std::sqrt(angular_form(*grid_, channel_, u.values, -1.0)) / psi_B;
        Eigen::VectorXcd p2(grid_->size());
        const Complex z(lambda, eps);
        for (int i = 0; i < grid_->size(); ++i) {
            const double t = grid_->t()(i);
            const double V = spec.potential(t);
            const double ra =
                std::pow(smoothed_radius(t).v, -spec.alpha);
            p2(i) = ra * (2.0 * psi.values(i) + 2.0 * (z - V) * u.values(i));
        }
        q[3] = shell_norms(WaveField(grid_, p2)).Bstar / psi_B;
        rep.quotients.push_back(q);
        if (rep.eps.back() <= eps_min) break;
    }
    const size_t m = rep.quotients.size();
    if (m >= 2) {
        rep.stable = true;
        for (int c = 0; c < 4; ++c) {
            const double a = rep.quotients[m - 2][c], b = rep.quotients[m - 1][c];
            rep.last_change[c] = std::abs(b - a) / std::max(std::abs(b), 1e-300);
            if (c != 2 || b > 1e-14) {  // the angular quotient may be exactly 0
                if (rep.last_change[c] > 1e-2 && b > 1e-14) rep.stable = false;
            }
        }
    }
    std::vector<double> lx, ly;
    for (size_t i = 0; i + 1 < fields.size(); ++i) {
        WaveField d(grid_, fields[i] - fields[i + 1]);
        const double gap = rep.eps[i] - rep.eps[i + 1];
        if (gap <= 0.0) continue;
        const double val = norm_weighted(d, -1.0);
        if (val > 0.0) {
            lx.push_back(std::log(gap));
            ly.push_back(std::log(val));
        }
    }
    rep.hoelder_exponent = fit_slope(lx, ly).slope;
    return rep;
}

RadiationReport ResolventSolver::radiation_diagnostic(double lambda, int sign,
                                                      const WaveField& psi,
                                                      double beta) {
    RadiationReport rep;
    rep.beta = beta;
    if (beta >= ctx_.beta_c())
        throw std::invalid_argument(
            "radiation_diagnostic: beta must be below the critical exponent");
    SolveOptions opts;
    const ResolventResult r = solve({lambda, 0.0, sign}, psi, opts);
    const Eigen::VectorXcd au = apply_conjugate_op(*grid_, r.u.values);
    Eigen::VectorXcd correct(grid_->size()), wrong(grid_->size());
    for (int i = 0; i < grid_->size(); ++i) {
        const double t = grid_->t()(i);
        Complex a(0.0, 0.0);
        try {
            a = phase_a(Complex(lambda, 0.0), t, sign, grid_->spec(), ctx_);
        } catch (const BranchCutError&) {
            a = 0.0;  // inside the inner cutoff: contributes nothing anyway
        }
        const double w = std::pow(grid_->f()(i), beta);
        correct(i) = w * (au(i) - static_cast<double>(sign) * a * r.u.values(i));
        wrong(i) = w * (au(i) + static_cast<double>(sign) * a * r.u.values(i));
    }
    rep.correct_profile = shell_norms(WaveField(grid_, correct)).profile;
    rep.wrong_profile = shell_norms(WaveField(grid_, wrong)).profile;
    rep.correct_profile.resize(
        std::min<size_t>(rep.correct_profile.size(), grid_->complete_shells()));
    rep.wrong_profile.resize(
        std::min<size_t>(rep.wrong_profile.size(), grid_->complete_shells()));
    // drop the inner shells where the cutoff distorts the comparison
    const int n0 = std::min<int>(ctx_.m + 1,
                                 static_cast<int>(rep.correct_profile.size()));
    std::vector<double> cp(rep.correct_profile.begin() + n0,
                           rep.correct_profile.end());
    std::vector<double> wp(rep.wrong_profile.begin() + n0,
                           rep.wrong_profile.end());
    rep.correct_slope = profile_slope(cp);
    rep.wrong_slope = profile_slope(wp);
    if (!cp.empty() && cp.back() > 0.0)
        rep.separation = wp.back() / cp.back();
    return rep;
}

}  // namespace repscat
