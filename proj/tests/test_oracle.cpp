#include "doctest.h"

#include <cmath>
#include <complex>

#include "repscat/airy.hpp"
#include "repscat/geometry.hpp"
#include "repscat/oracle.hpp"

using namespace repscat;
using C = std::complex<double>;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("exact outgoing wave solves the line equation") {
    const double lam = 1.0;
    for (double x : {3.0, 12.0, 41.0}) {
        const double h = 1e-3;
        const C d2 = (airy_outgoing(lam, x + h).first -
                      2.0 * airy_outgoing(lam, x).first +
                      airy_outgoing(lam, x - h).first) /
                     (h * h);
        const C expct = -(x + 2.0 * lam) * airy_outgoing(lam, x).first;
        CHECK(std::abs(d2 - expct) < 1e-5 * std::abs(expct));
        // derivative consistency (fourth-order differences: the wave
        // oscillates at wavenumber sqrt(x + 2 lambda))
        const C d1 = (-airy_outgoing(lam, x + 2 * h).first +
                      8.0 * airy_outgoing(lam, x + h).first -
                      8.0 * airy_outgoing(lam, x - h).first +
                      airy_outgoing(lam, x - 2 * h).first) /
                     (12.0 * h);
        CHECK(std::abs(d1 - airy_outgoing(lam, x).second) <
              1e-6 * std::abs(d1));
    }
}

TEST_CASE("exact outgoing wave carries the model normalization") {
    // t^{1/4} e^{-i theta} w -> 1 with leading drift lambda^2 t^{-1/2}
    for (double lam : {0.5, 2.0}) {
        const double t = 4.0e4;
        const auto [w, dw] = airy_outgoing(lam, t);
        const double th = eikonal_phase(1.0, lam, t).v;
        const C val = std::pow(t, 0.25) * std::exp(C(0.0, -th)) * w;
        CHECK(std::abs(std::abs(val) - 1.0) < 1e-4);
        CHECK(std::arg(val) ==
              doctest::Approx(lam * lam / std::sqrt(t)).epsilon(0.03));
    }
}

TEST_CASE("airy scattering matrix is unitary and parity symmetric") {
    double prev_reflection = 1.0;
    for (double lam : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const OracleResult r = airy_smatrix(lam);
        CHECK(r.unitarity_defect <= 1e-10);
        CHECK(std::abs(r.S(0, 0) - r.S(1, 1)) == 0.0);  // centro-symmetric
        CHECK(std::abs(r.S(0, 1) - r.S(1, 0)) == 0.0);
        // transmission dominates and reflection falls with energy
        CHECK(std::abs(r.S(0, 0)) > std::abs(r.S(1, 0)));
        CHECK(std::abs(r.S(1, 0)) < prev_reflection);
        prev_reflection = std::abs(r.S(1, 0));
    }
}

TEST_CASE("magnus propagator reproduces the airy flow") {
    const double lam = 0.8;
    auto g = [&](double x) { return -(std::abs(x) + 2.0 * lam); };
    const AiryValues a0 = airy(-2.0 * lam);
    // u(x) = Ai(-(x + 2 lam)) on the half line
    OdeState s{a0.ai, -a0.dai};
    const double X = 40.0;
    const OdeState sX = propagate_magnus(g, 0.0, X, s, 1e-12);
    const AiryValues aX = airy(-(X + 2.0 * lam));
    CHECK(sX.u == doctest::Approx(aX.ai).epsilon(5e-10));
    CHECK(sX.du == doctest::Approx(-aX.dai).epsilon(5e-10));
}

TEST_CASE("ode oracle agrees with the airy oracle in the free case") {
    const PotentialSpec spec = PotentialSpec::make(1.0, 1, {});
    for (double lam : {0.5, 1.0, 2.0}) {
        const OracleResult airy_r = airy_smatrix(lam);
        const OracleResult ode_r = ode_smatrix(lam, spec, {}, 160.0);
        CHECK((airy_r.S - ode_r.S).norm() <= 1e-8);
        CHECK(ode_r.unitarity_defect <= 1e-8);
    }
}

TEST_CASE("ode oracle is stable under the ladder cap") {
    const PotentialSpec spec =
        PotentialSpec::make(1.0, 1, {TailKind::inverse_power, 0.3, 1.0, 1.0});
    const OracleResult a = ode_smatrix(1.0, spec, {}, 128.0);
    const OracleResult b = ode_smatrix(1.0, spec, {}, 192.0);
    CHECK((a.S - b.S).norm() <= 1e-7);
}

TEST_CASE("ode oracle unitarity for general cases") {
    for (double alpha : {0.8, 1.5}) {
        const double s_pow = 2.0 * (1.0 - 0.5 * alpha);
        const PotentialSpec spec = PotentialSpec::make(
            alpha, 1, {TailKind::inverse_power, 0.3, s_pow, 1.0});
        for (double lam : {0.5, 1.5}) {
            const OracleResult r = ode_smatrix(lam, spec, {}, 256.0);
            CHECK(r.unitarity_defect <= 1e-8);
        }
    }
    // partial-wave channels
    const PotentialSpec s3 =
        PotentialSpec::make(1.0, 3, {TailKind::inverse_power, 0.4, 2.0, 1.0});
    for (int ell : {0, 1, 3}) {
        const OracleResult r = ode_smatrix(1.0, s3, Channel{ell}, 256.0);
        CHECK(r.unitarity_defect <= 1e-8);
        CHECK(std::abs(std::abs(r.S(0, 0)) - 1.0) <= 1e-8);
    }
}

TEST_SUITE_END();
