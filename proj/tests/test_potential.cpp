#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "repscat/potential.hpp"

using namespace repscat;

namespace {
template <typename F>
double fd1(F&& f, double x, double h = 1e-5) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}
}  // namespace

TEST_SUITE_BEGIN("potential");

TEST_CASE("alpha range is enforced") {
    CHECK_THROWS_AS(PotentialSpec::make(2.5, 1, {}), std::invalid_argument);
    CHECK_THROWS_AS(PotentialSpec::make(0.5, 1, {}), std::invalid_argument);
    CHECK_NOTHROW(PotentialSpec::make(0.7, 1, {}));
    CHECK_NOTHROW(PotentialSpec::make(1.9, 3, {}));
}

TEST_CASE("tail derivatives agree with finite differences") {
    PotentialTail ip{TailKind::inverse_power, 0.3, 2.0, 1.0};
    PotentialTail ga{TailKind::gaussian, -0.4, 0.0, 2.5};
    for (const auto& tail : {ip, ga}) {
        const PotentialSpec spec = PotentialSpec::make(1.0, 1, tail);
        for (double t : {0.5, 2.0, 7.0, 30.0}) {
            CHECK(spec.dq(t) ==
                  doctest::Approx(fd1([&](double x) { return spec.q(x); }, t))
                      .epsilon(1e-7));
            CHECK(spec.d2q(t) ==
                  doctest::Approx(fd1([&](double x) { return spec.dq(x); }, t))
                      .epsilon(1e-6));
            CHECK(spec.d3q(t) ==
                  doctest::Approx(fd1([&](double x) { return spec.d2q(x); }, t))
                      .epsilon(1e-5));
        }
    }
}

TEST_CASE("implied decay rate for inverse-power tails") {
    // q ~ t^{-s}, f ~ t^{1-alpha/2}: rho = s/(1-alpha/2) - 1
    const PotentialSpec spec =
        PotentialSpec::make(1.0, 1, {TailKind::inverse_power, 0.3, 1.0, 1.0});
    CHECK(spec.rho == doctest::Approx(1.0));
    const PotentialSpec s2 =
        PotentialSpec::make(1.5, 1, {TailKind::inverse_power, 0.2, 0.5, 1.0});
    CHECK(s2.rho == doctest::Approx(1.0));
}

TEST_CASE("short-range validation accepts admissible tails") {
    const PotentialSpec spec =
        PotentialSpec::make(1.0, 3, {TailKind::inverse_power, 0.5, 2.0, 1.0});
    const ShortRangeFit fit = validate_short_range(spec);
    CHECK(fit.ok);
    CHECK(fit.C0 > 0.0);
    CHECK(fit.C1 > 0.0);
}

TEST_CASE("too-slow tails are rejected") {
    // s = 0.2 at alpha = 1 gives rho = -0.6
    CHECK_THROWS_AS(
        PotentialSpec::make(1.0, 1, {TailKind::inverse_power, 0.3, 0.2, 1.0}),
        std::invalid_argument);
    // declaring a rate the tail cannot meet must fail the sampling check
    CHECK_THROWS_AS(
        PotentialSpec::make(1.0, 1, {TailKind::inverse_power, 0.3, 1.0, 1.0}, 3.0),
        std::invalid_argument);
}

TEST_SUITE_END();
