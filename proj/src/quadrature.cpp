#include "repscat/quadrature.hpp"

#include <cmath>

namespace repscat {

namespace {

// Gauss-Legendre 15-point nodes/weights on [-1, 1].
constexpr int kN = 15;
constexpr double kNodes[kN] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kWeights[kN] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

template <typename T>
T panel(const std::function<T(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    T acc{};
    for (int i = 0; i < kN; ++i) acc += T(kWeights[i]) * f(mid + half * kNodes[i]);
    return T(half) * acc;
}

template <typename T>
T adaptive_rec(const std::function<T(double)>& f, double a, double b,
               double tol_density, int depth) {
    const T whole = panel(f, a, b);
    const double mid = 0.5 * (a + b);
    const T left = panel(f, a, mid), right = panel(f, mid, b);
    const double err = std::abs(left + right - whole);
    // error budget proportional to the subinterval length, with a roundoff
    // floor so machine-noise disagreements do not recurse forever
    const double floor = 1e-15 * (std::abs(left) + std::abs(right));
    if (err < tol_density * (b - a) + floor || depth <= 0) return left + right;
    return adaptive_rec(f, a, mid, tol_density, depth - 1) +
           adaptive_rec(f, mid, b, tol_density, depth - 1);
}

template <typename T>
T adaptive(const std::function<T(double)>& f, double a, double b, double tol,
           int depth) {
    if (b <= a) return T{};
    return adaptive_rec(f, a, b, tol / (b - a), depth);
}

template <typename T>
T tail(const std::function<T(double)>& f, double r0, double tol) {
    // s = r0 / y^8 maps the tail to y in (0, 1]; the y^8 power flattens the
    // endpoint for integrands decaying as slowly as s^{-9/8}.
    auto g = [&](double y) -> T {
        if (y <= 0.0) return T{};
        const double s = r0 / std::pow(y, 8);
        return f(s) * T(8.0 * r0 * std::pow(y, -9.0));
    };
    return adaptive<T>(g, 0.0, 1.0, tol, 48);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
    return adaptive<double>(f, a, b, abs_tol, max_depth);
}

std::complex<double> integrate_c(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    double abs_tol, int max_depth) {
    return adaptive<std::complex<double>>(f, a, b, abs_tol, max_depth);
}

double integrate_tail(const std::function<double(double)>& f, double r0,
                      double abs_tol) {
    return tail<double>(f, r0, abs_tol);
}

std::complex<double> integrate_tail_c(
    const std::function<std::complex<double>(double)>& f, double r0,
    double abs_tol) {
    return tail<std::complex<double>>(f, r0, abs_tol);
}

}  // namespace repscat
