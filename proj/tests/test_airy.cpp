#include "doctest.h"

#include <cmath>

#include <initializer_list>

#include "repscat/airy.hpp"

using namespace repscat;

TEST_SUITE_BEGIN("airy");

TEST_CASE("values at the origin and published anchors") {
    const AiryValues v0 = airy(0.0);
    CHECK(v0.ai == doctest::Approx(0.3550280538878172).epsilon(1e-15));
    CHECK(v0.dai == doctest::Approx(-0.2588194037928068).epsilon(1e-15));
    CHECK(v0.bi == doctest::Approx(0.6149266274460007).epsilon(1e-15));
    CHECK(v0.dbi == doctest::Approx(0.4482883573538264).epsilon(1e-15));
    // classical tabulated anchors
    CHECK(airy(1.0).ai == doctest::Approx(0.1352924163128814).epsilon(1e-13));
    CHECK(airy(1.0).bi == doctest::Approx(1.2074235949528713).epsilon(1e-13));
    CHECK(airy(-1.0).ai == doctest::Approx(0.5355608832923521).epsilon(1e-13));
    CHECK(airy(-1.0).bi == doctest::Approx(0.1039973894969446).epsilon(1e-13));
}

TEST_CASE("wronskian identity across the argument range") {
    const double w = 1.0 / M_PI;
    for (double z = -40.0; z <= 4.0; z += 0.37) {
        CHECK(std::abs(airy_wronskian(z) - w) <= 1e-14);
    }
    // looser far range (accumulated marching error)
    for (double z = -40.0; z >= -150.0; z -= 7.3) {
        CHECK(std::abs(airy_wronskian(z) - w) <= 1e-13);
    }
}

TEST_CASE("oscillatory asymptotics") {
    // Ai(-t) ~ pi^{-1/2} t^{-1/4} sin(zeta + pi/4), zeta = (2/3) t^{3/2}
    for (double t : {30.0, 80.0}) {
        const double zeta = (2.0 / 3.0) * std::pow(t, 1.5);
        const double lead =
            std::sin(zeta + 0.25 * M_PI) / (std::sqrt(M_PI) * std::pow(t, 0.25));
        CHECK(std::abs(airy(-t).ai - lead) < 2.0 / std::pow(t, 1.75));
    }
}

TEST_CASE("differential equation satisfied") {
    for (double z : {-20.0, -3.3, 2.1}) {
        const double h = 1e-3;
        const double d2 =
            (airy(z + h).ai - 2.0 * airy(z).ai + airy(z - h).ai) / (h * h);
        CHECK(d2 == doctest::Approx(z * airy(z).ai).epsilon(1e-5));
    }
}

TEST_SUITE_END();
