#include "repscat/airy.hpp"

#include <cmath>
#include <cstdlib>

namespace repscat {

namespace {

// Ai(0), Ai'(0), Bi(0), Bi'(0)
constexpr long double kAi0 = 0.35502805388781723926L;
constexpr long double kDai0 = -0.25881940379280679841L;
constexpr long double kBi0 = 0.61492662744600073515L;
constexpr long double kDbi0 = 0.44828835735382635789L;

struct Pair {
    long double v, d;
};

// Maclaurin series of the two standard solutions f, g of w'' = z w:
// f = 1 + z^3/6 + ..., g = z + z^4/12 + ...
void maclaurin(long double z, Pair* f, Pair* g) {
    const long double z3 = z * z * z;
    long double af = 1.0L, ag = z;          // term values
    long double f_v = af, g_v = ag;
    long double f_d = 0.0L, g_d = 1.0L;     // derivative series
    long double af_d = 0.0L, ag_d = 1.0L;
    for (int k = 0; k < 60; ++k) {
        const long double df = (3.0L * k + 1.0L);
        const long double dg = (3.0L * k + 2.0L);
        af *= z3 / ((3.0L * k + 2.0L) * (3.0L * k + 3.0L));
        ag *= z3 / ((3.0L * k + 3.0L) * (3.0L * k + 4.0L));
        f_v += af;
        g_v += ag;
        // derivative terms: d/dz z^{3k} = 3k z^{3k-1}, handled via the ratio
        af_d = af * (3.0L * k + 3.0L) / (z == 0.0L ? 1.0L : z);
        ag_d = ag * (3.0L * k + 4.0L) / (z == 0.0L ? 1.0L : z);
        f_d += af_d;
        g_d += ag_d;
        if (std::abs((double)af) < 1e-20 * std::abs((double)f_v) &&
            std::abs((double)ag) < 1e-20 * std::abs((double)g_v) && k > 3)
            break;
        (void)df;
        (void)dg;
    }
    *f = {f_v, f_d};
    *g = {g_v, g_d};
}

// One Taylor step for w'' = z w from z0 to z0 + h, given (w, w').
Pair taylor_step(long double z0, long double h, Pair w) {
    // coefficients c_n of w(z0 + s): (n+2)(n+1) c_{n+2} = z0 c_n + c_{n-1}
    const int kMax = 40;
    long double c[kMax + 3];
    c[0] = w.v;
    c[1] = w.d;
    for (int n = 0; n + 2 <= kMax + 2; ++n) {
        const long double prev = (n >= 1) ? c[n - 1] : 0.0L;
        c[n + 2] = (z0 * c[n] + prev) / ((long double)(n + 1) * (n + 2));
    }
    long double v = 0.0L, d = 0.0L;
    for (int n = kMax + 2; n >= 1; --n) {
        v = v * h + c[n];
        d = d * h + c[n] * n;
    }
    v = v * h + c[0];
    // d currently holds sum c_n n h^{n-1}
    return {v, d};
}

Pair continue_to(long double z, Pair w0) {
    // march from 0 to z; steps shrink like |z0|^{-1/2} so the 40-term
    // Taylor window always converges to machine precision
    long double z0 = 0.0L;
    Pair w = w0;
    const long double dir = (z > 0) ? 1.0L : -1.0L;
    while (std::abs((double)(z - z0)) > 1e-18) {
        const long double hmax =
            1.2L / std::sqrt(1.0L + std::abs((double)z0));
        long double h = z - z0;
        if (std::abs((double)h) > (double)hmax) h = dir * hmax;
        w = taylor_step(z0, h, w);
        z0 += h;
    }
    return w;
}

}  // namespace

AiryValues airy(double z) {
    AiryValues out;
    if (std::abs(z) <= 1.5) {
        Pair f, g;
        maclaurin((long double)z, &f, &g);
        out.ai = (double)(kAi0 * f.v + kDai0 * g.v);
        out.dai = (double)(kAi0 * f.d + kDai0 * g.d);
        out.bi = (double)(kBi0 * f.v + kDbi0 * g.v);
        out.dbi = (double)(kBi0 * f.d + kDbi0 * g.d);
        return out;
    }
    const Pair ai = continue_to((long double)z, {kAi0, kDai0});
    const Pair bi = continue_to((long double)z, {kBi0, kDbi0});
    out.ai = (double)ai.v;
    out.dai = (double)ai.d;
    out.bi = (double)bi.v;
    out.dbi = (double)bi.d;
    return out;
}

double airy_wronskian(double z) {
    const AiryValues v = airy(z);
    return v.ai * v.dbi - v.dai * v.bi;
}

}  // namespace repscat
