#include "doctest.h"

#include <cmath>
#include <random>

#include "repscat/geometry.hpp"

using namespace repscat;

namespace {

// Fourth-order central-difference oracle for first derivatives.
template <typename F>
double fd1(F&& f, double x, double h = 1e-3) {
    return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) /
           (12.0 * h);
}

}  // namespace

TEST_SUITE_BEGIN("geometry");

TEST_CASE("cutoff plateaus and monotonicity") {
    CHECK(cutoff(0.5) == 1.0);
    CHECK(cutoff(1.0) == 1.0);
    CHECK(cutoff(2.0) == 0.0);
    CHECK(cutoff(3.0) == 0.0);
    const double mid = cutoff(1.5);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    CHECK(cutoff_jet(1.5).d1 < 0.0);
    // dense sampling: nonincreasing, values in [0,1]
    double prev = 1.0;
    for (int i = 0; i <= 400; ++i) {
        const double s = 0.9 + 1.3 * i / 400.0;
        const double v = cutoff(s);
        CHECK(v <= prev + 1e-15);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
}

TEST_CASE("cutoff derivatives match finite differences") {
    for (double s : {1.1, 1.3, 1.5, 1.7, 1.9}) {
        const Jet4 j = cutoff_jet(s);
        const double d1 = fd1([](double x) { return cutoff(x); }, s);
        CHECK(j.d1 == doctest::Approx(d1).epsilon(1e-6));
        const double d2 =
            fd1([](double x) { return cutoff_jet(x).d1; }, s);
        CHECK(j.d2 == doctest::Approx(d2).epsilon(1e-6));
        const double d3 =
            fd1([](double x) { return cutoff_jet(x).d2; }, s);
        CHECK(j.d3 == doctest::Approx(d3).epsilon(1e-5));
        const double d4 =
            fd1([](double x) { return cutoff_jet(x).d3; }, s);
        CHECK(j.d4 == doctest::Approx(d4).epsilon(1e-5));
    }
}

TEST_CASE("smoothed radius endpoints and monotonicity") {
    CHECK(smoothed_radius(0.3).v == 1.0);
    CHECK(smoothed_radius(1.0).v == 1.0);
    CHECK(smoothed_radius(2.0).v == 2.0);
    CHECK(smoothed_radius(7.5).v == 7.5);
    double prev = 1.0;
    for (int i = 0; i <= 300; ++i) {
        const double t = 0.5 + 2.0 * i / 300.0;
        const Jet4 r = smoothed_radius(t);
        CHECK(r.v >= prev - 1e-14);
        CHECK(r.v >= 1.0);
        prev = r.v;
    }
    for (double t : {1.2, 1.5, 1.8}) {
        const Jet4 r = smoothed_radius(t);
        CHECK(r.d1 ==
              doctest::Approx(fd1([](double x) { return smoothed_radius(x).v; }, t))
                  .epsilon(1e-7));
    }
}

TEST_CASE("escape function values") {
    // closed-form spot values
    CHECK(escape_function(1.3, 1.0) == doctest::Approx(1.0));
    CHECK(escape_function(1.0, 4.0) == doctest::Approx(3.0));          // 2(sqrt(4)-1)+1
    CHECK(escape_function(4.0 / 3.0, 8.0) == doctest::Approx(4.0));    // 3(8^{1/3}-1)+1
    // f >= 1 everywhere and monotone
    for (double a : {0.7, 1.0, 1.5, 1.9}) {
        double prev = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double t = 0.1 + i * 0.25;
            const double f = escape_function(a, t);
            CHECK(f >= 1.0 - 1e-14);
            CHECK(f >= prev - 1e-12);
            prev = f;
        }
        // inverse round-trips
        for (double f : {1.5, 4.0, 62.0, 500.0}) {
            const double r = escape_radius(a, f);
            CHECK(escape_function(a, r) == doctest::Approx(f).epsilon(1e-12));
        }
    }
}

TEST_CASE("geometry jet derivatives agree with finite differences") {
    // relative error <= 1e-6 at step 1e-4 on the far region
    for (double a : {0.8, 1.0, 1.5}) {
        for (int d : {1, 3}) {
            for (double t : {4.0, 11.0, 101.0, 997.0}) {
                const GeometryJet g = geometry_jet(a, d, t);
                const double f1 =
                    fd1([&](double x) { return geometry_jet(a, d, x).f.v; }, t);
                CHECK(g.f.d1 == doctest::Approx(f1).epsilon(1e-6));
                const double lap1 = fd1(
                    [&](double x) { return geometry_jet(a, d, x).lap_f; }, t);
                CHECK(g.dlap_f_dt == doctest::Approx(lap1).epsilon(1e-5));
                const double glap1 = fd1(
                    [&](double x) { return geometry_jet(a, d, x).grad_lap_f; }, t);
                CHECK(g.d_grad_lap_f_dt == doctest::Approx(glap1).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("far-field laplacian closed form") {
    // lap f = (d - 1 - alpha/2) r^{-alpha/2 - 1} for r >= 2
    for (double a : {0.8, 1.4}) {
        for (int d : {1, 2, 3}) {
            const double t = 37.0;
            const GeometryJet g = geometry_jet(a, d, t);
            const double expct = (d - 1.0 - 0.5 * a) * std::pow(t, -0.5 * a - 1.0);
            CHECK(g.lap_f == doctest::Approx(expct).epsilon(1e-13));
        }
    }
}

TEST_CASE("eikonal phase values and gradient oracle") {
    // alpha=1, lambda=0, r=1: r^{3/2}/(3/2) = 2/3
    CHECK(eikonal_phase(1.0, 0.0, 1.0).v == doctest::Approx(2.0 / 3.0));
    // alpha=1, lambda=2, r=4: 4^{3/2}/(3/2) + 2 f(4) = 16/3 + 6 = 34/3
    CHECK(eikonal_phase(1.0, 2.0, 4.0).v == doctest::Approx(34.0 / 3.0));
    // gradient against central differences at r = 10
    for (double a : {0.8, 1.0, 1.5}) {
        for (double lam : {0.0, 0.7, 2.0}) {
            const double t = 10.0;
            const double fd = fd1(
                [&](double x) { return eikonal_phase(a, lam, x).v; }, t, 1e-5);
            CHECK(eikonal_phase(a, lam, t).dt ==
                  doctest::Approx(fd).epsilon(1e-8));
        }
    }
    // monotone increasing in r for lambda >= 0
    double prev = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double v = eikonal_phase(1.3, 0.5, 0.2 * i).v;
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
}

TEST_CASE("exact free phase matches the generic one to leading order") {
    // theta_1 - theta = lambda + lambda^2 r^{-1/2} + O(r^{-3/2})
    const double lam = 0.8;
    for (double r : {1.0e3, 1.0e4}) {
        const PhaseJet p1 = exact_free_phase(lam, r);
        const PhaseJet p = eikonal_phase(1.0, lam, r);
        const double expct = lam + lam * lam / std::sqrt(r);
        CHECK(std::abs(p1.v - p.v - expct) < 2.0 * std::pow(r, -1.5));
    }
}

TEST_CASE("angular matrix is PSD and annihilates the radial direction") {
    std::mt19937 rng(42);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = 1 + trial % 4;
        Eigen::VectorXd x(d);
        for (int k = 0; k < d; ++k) x(k) = 3.0 * gauss(rng);
        const Eigen::MatrixXd m = angular_matrix(1.2, x);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        CHECK(es.eigenvalues().minCoeff() >= -1e-12);
        if (x.norm() > 1e-12) {
            CHECK((m * x).norm() <= 1e-12 * std::max(1.0, m.norm() * x.norm()));
        }
    }
    // d=1, r>=2: identically zero; d=3: r^{-alpha} (I - projector)
    Eigen::VectorXd x1(1);
    x1 << 5.0;
    CHECK(angular_matrix(1.0, x1).norm() == 0.0);
    Eigen::VectorXd x3(3);
    x3 << 3.0, 0.0, 4.0;  // |x| = 5
    const Eigen::MatrixXd m3 = angular_matrix(1.0, x3);
    const Eigen::VectorXd xhat = x3 / 5.0;
    const Eigen::MatrixXd expct =
        std::pow(5.0, -1.0) * (Eigen::MatrixXd::Identity(3, 3) -
                               xhat * xhat.transpose());
    CHECK((m3 - expct).norm() <= 1e-12);
}

TEST_CASE("weight profile closed form and limits") {
    WeightParams p{1.0, 0};
    // delta=1, nu=0, f large: w -> 1
    CHECK(weight_jet(1e9, p).v == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(weight_jet(0.0, p).v == 0.0);
    // derivative oracle
    for (double del : {0.1, 0.5, 1.0}) {
        for (int nu : {0, 3, 7}) {
            WeightParams w{del, nu};
            for (double f : {1.0, 10.0, 300.0}) {
                const double d1 = fd1(
                    [&](double x) { return weight_jet(x, w).v; }, f, 1e-4);
                CHECK(weight_jet(f, w).d1 == doctest::Approx(d1).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("weight inequalities over the full sweep") {
    // increasing, concave, bounded by min(1/delta, f/2^nu); derivative
    // bracket and sign alternation up to third order
    for (double del : {0.1, 0.5, 1.0}) {
        for (int nu = 0; nu <= 10; ++nu) {
            WeightParams p{del, nu};
            const double scale = std::ldexp(1.0, -nu);
            double c_low = 1e300, c_ratio_low = 1e300;
            for (int i = 0; i <= 300; ++i) {
                const double f = std::pow(10.0, 4.0 * i / 300.0);
                const Jet4 w = weight_jet(f, p);
                CHECK(w.v <= 1.0 / del + 1e-12);
                CHECK(w.v <= f * scale * (1.0 + 1e-12));
                CHECK(w.d1 >= 0.0);
                CHECK(w.d2 <= 1e-300);
                CHECK(w.d3 >= -1e-300);
                CHECK(w.d1 <= w.v / f * (1.0 + 1e-10));
                const double lower =
                    std::pow(std::min(std::ldexp(1.0, nu), f), del) *
                    std::pow(f, -1.0 - del) * w.v;
                if (lower > 0.0) c_ratio_low = std::min(c_ratio_low, w.d1 / lower);
                c_low = std::min(c_low, w.v / scale);
            }
            CHECK(c_low > 0.0);        // w >= c 2^{-nu} on f >= 1
            CHECK(c_ratio_low > 0.0);  // lower derivative bound with finite c
        }
    }
}

TEST_SUITE_END();
