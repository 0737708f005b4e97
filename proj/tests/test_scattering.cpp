#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "repscat/oracle.hpp"
#include "repscat/scattering.hpp"

using namespace repscat;
using C = std::complex<double>;

namespace {

GridParams pipeline_grid(double L = 1000.0, int order = 8, double ppw = 48.0) {
    GridParams p;
    p.L = L;
    p.order = order;
    p.ppw = ppw;
    p.lambda_ref = 2.0;
    p.origin_spacing = 2e-4;
    return p;
}

WaveField bump(const GridPtr& g, double center, double width,
               double modulation = 0.0) {
    WaveField psi = WaveField::zero(g);
    for (int i = 0; i < g->size(); ++i) {
        const double s = (g->x()(i) - center) / width;
        if (std::abs(s) < 12.0)
            psi.values(i) = std::exp(-s * s) *
                            std::exp(C(0.0, modulation * g->x()(i)));
    }
    return psi;
}

}  // namespace

TEST_SUITE_BEGIN("scattering");

TEST_CASE("incident source routes agree at the stencil order") {
    const PotentialSpec spec = PotentialSpec::make(1.0, 1, {});
    std::vector<double> gaps;
    for (double ppw : {16.0, 32.0}) {
        Pipeline pipe(spec, pipeline_grid(200.0, 4, ppw), 0.5, 2.0);
        Eigen::VectorXcd v(2);
        v << 1.0, 0.5;
        const Incident inc = pipe.channel(0).incident(1.0, -1, v);
        gaps.push_back(inc.route_disagreement);
    }
    CHECK(gaps[1] < gaps[0]);
    CHECK(observed_orders(gaps).front() >= 3.4);
}

TEST_CASE("incident source has a convergent dyadic-shell norm") {
    const PotentialSpec spec =
        PotentialSpec::make(0.8, 1, {TailKind::inverse_power, 0.3, 1.2, 1.0});
    Pipeline pipe(spec, pipeline_grid(600.0, 4, 24.0), 0.5, 2.0);
    Eigen::VectorXcd v(2);
    v << 1.0, 0.0;
    const Incident inc = pipe.channel(0).incident(1.0, -1, v);
    // profile 2^{-n/2}||F_n psi||: B-summability needs decay faster than 2^{-n}
    const auto& prof = inc.psi_norms.profile;
    std::vector<double> tail(prof.begin() + 3, prof.end());
    CHECK(profile_slope(tail) < -1.0);
}

TEST_CASE("zero data gives the zero eigenfunction") {
    const PotentialSpec spec = PotentialSpec::make(1.0, 1, {});
    Pipeline pipe(spec, pipeline_grid(200.0, 4, 16.0), 0.5, 2.0);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2);
    const EigenfunctionRecord rec =
        pipe.channel(0).adjoint_eigenfunction(1.0, +1, v);
    CHECK(norm_l2(rec.phi) == 0.0);
}

TEST_CASE("single-level trace has the unimodular-prefactor modulus") {
    const PotentialSpec spec = PotentialSpec::make(1.0, 1, {});
    Pipeline pipe(spec, pipeline_grid(200.0, 4, 16.0), 0.5, 2.0);
    const GridPtr g = pipe.grid();
    const WaveField u = bump(g, 30.0, 40.0, 1.0);
    const double f_level = 12.0;
    const Eigen::VectorXcd tr = pipe.channel(0).shell_trace(1.0, +1, u, f_level);
    const int i = g->node_near_f(f_level);
    const double expct = std::pow(g->t()(i), 0.25) * std::abs(u.values(i)) /
                         std::sqrt(2.0 * M_PI);
    CHECK(std::abs(tr(0)) == doctest::Approx(expct).epsilon(1e-12));
    CHECK_THROWS_AS(pipe.channel(0).shell_trace(1.0, +1, u, 3.0),
                    std::invalid_argument);
}

TEST_CASE("trace prefactor arithmetic at alpha = 1, d = 1") {
    const PotentialSpec spec = PotentialSpec::make(1.0, 1, {});
    // (d - alpha/2 - 3)/(1 + alpha/2) = -5/3: phase exp(-i 5 pi / 12)
    const C pref = trace_prefactor(spec, +1);
    CHECK(std::arg(pref) == doctest::Approx(-5.0 * M_PI / 12.0).epsilon(1e-14));
    CHECK(std::abs(pref) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)));
}

TEST_CASE("wave matrices share their norm and satisfy Parseval") {
    const PotentialSpec spec = PotentialSpec::make(1.0, 1, {});
    Pipeline pipe(spec, pipeline_grid(), 0.5, 2.0);
    const GridPtr g = pipe.grid();
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        const WaveField psi = bump(g, 4.0 * uni(rng), 1.0 + 0.5 * trial,
                                   1.2 + 0.2 * uni(rng));
        const auto check = pipe.parseval(1.0, 0, psi);
        CHECK(std::abs(check.norm_plus - check.norm_minus) <=
              1e-5 * check.norm_plus);
        CHECK(check.rel_error <= 1e-4);
        CHECK(check.flux_error <= 1e-3);
    }
}

TEST_CASE("scattering matrix against the closed-form oracle") {
    const PotentialSpec spec = PotentialSpec::make(1.0, 1, {});
    Pipeline pipe(spec, pipeline_grid(), 0.5, 2.0);
    for (double lam : {0.5, 1.0, 2.0}) {
        const SMatrixResult S = pipe.scattering_matrix(lam);
        const OracleResult a = airy_smatrix(lam);
        CHECK((S.S - a.S).norm() <= 1e-6);
        CHECK(S.unitarity_defect <= 1e-5);
        CHECK(S.roundtrip_error <= 1e-4);
        CHECK(S.parity_commutator <= 1e-6);
        CHECK(!S.flagged);
    }
}

TEST_CASE("scattering matrix against the ODE oracle with a tail") {
    const double alpha = 0.8;
    const double s_pow = 2.0 * (1.0 - 0.5 * alpha);
    const PotentialSpec spec = PotentialSpec::make(
        alpha, 1, {TailKind::inverse_power, 0.3, s_pow, 1.0});
    Pipeline pipe(spec, pipeline_grid(2000.0, 8, 40.0), 0.5, 2.0);
    for (double lam : {0.5, 1.0}) {
        const SMatrixResult S = pipe.scattering_matrix(lam);
        const OracleResult o = ode_smatrix(lam, spec, {}, 256.0);
        CHECK((S.S - o.S).norm() <= 1e-5);
        CHECK(S.unitarity_defect <= 1e-5);
    }
}

TEST_CASE("partial-wave channels against the ODE oracle") {
    const PotentialSpec spec =
        PotentialSpec::make(1.0, 3, {TailKind::inverse_power, 0.4, 2.0, 1.0});
    Pipeline pipe(spec, pipeline_grid(800.0, 8, 40.0), 0.5, 2.0, 3);
    const SMatrixResult S = pipe.scattering_matrix(1.0);
    CHECK(S.unitarity_defect <= 1e-5);
    for (int l = 0; l <= 3; ++l) {
        const OracleResult o = ode_smatrix(1.0, spec, Channel{l}, 256.0);
        CHECK(std::abs(S.S(l, l) - o.S(0, 0)) <= 1e-5);
    }
}

TEST_CASE("eigenfunction records close the round trip") {
    const PotentialSpec spec = PotentialSpec::make(1.0, 1, {});
    Pipeline pipe(spec, pipeline_grid(), 0.5, 2.0);
    ChannelPipeline& cp = pipe.channel(0);
    const double lam = 1.0;
    Eigen::VectorXcd v(2);
    v << 0.8, C(0.3, -0.4);
    EigenfunctionRecord rec = cp.adjoint_eigenfunction(lam, +1, v);
    CHECK(rec.interior_residual < 1e-7);

    const TraceExtraction xe_p = cp.extract_xi(lam, +1, rec.phi);
    const TraceExtraction xe_m = cp.extract_xi(lam, -1, rec.phi);
    rec.xi_plus = xe_p.value;
    rec.xi_minus = xe_m.value;
    CHECK((rec.xi_plus - v).norm() <= 1e-4 * v.norm());

    // xi+ = S xi-
    const SMatrixResult S = pipe.scattering_matrix(lam);
    CHECK((rec.xi_plus - S.S * rec.xi_minus).norm() <= 1e-4 * v.norm());

    cp.decomposition_check(lam, rec);
    CHECK(rec.norm_equality_error <= 1e-4);
    CHECK(rec.remainder_slope < -0.2);
    CHECK(rec.shell_average_error <= 1e-3);
}

TEST_CASE("extraction and synthesis are linear") {
    const PotentialSpec spec = PotentialSpec::make(1.0, 1, {});
    Pipeline pipe(spec, pipeline_grid(300.0, 8, 40.0), 0.5, 2.0);
    ChannelPipeline& cp = pipe.channel(0);
    const GridPtr g = pipe.grid();
    const WaveField p1 = bump(g, 2.0, 2.0, 0.4), p2 = bump(g, -5.0, 3.0, -0.2);
    const C a(0.3, 0.7), b(-1.1, 0.2);
    WaveField mix(g, a * p1.values + b * p2.values);
    const WaveField u1 = cp.limiting_field(1.0, +1, p1);
    const WaveField u2 = cp.limiting_field(1.0, +1, p2);
    const WaveField um = cp.limiting_field(1.0, +1, mix);
    const Eigen::VectorXcd t1 = cp.cesaro_wave_matrix(1.0, +1, u1).value;
    const Eigen::VectorXcd t2 = cp.cesaro_wave_matrix(1.0, +1, u2).value;
    const Eigen::VectorXcd tm = cp.cesaro_wave_matrix(1.0, +1, um).value;
    CHECK((tm - a * t1 - b * t2).norm() <=
          1e-10 * (t1.norm() + t2.norm() + tm.norm()));
}

TEST_CASE("inverse-iteration quasi-modes never decay across shells") {
    const PotentialSpec spec = PotentialSpec::make(1.0, 1, {});
    Pipeline pipe(spec, pipeline_grid(300.0, 4, 20.0), 0.5, 2.0);
    const auto rep = pipe.rellich_probe(1.0, 10);
    CHECK(rep.slopes.size() == 10);
    CHECK(rep.all_nondecaying);
}

TEST_SUITE_END();
