// Frenet <-> natural curvature transforms: closed forms, gauge residual of the
// frame change, round trips, and domain-error paths.

#include <cmath>
#include <numbers>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "vmkdv/hasimoto.hpp"
#include "vmkdv/operators.hpp"

using namespace vmkdv;
constexpr double pi = std::numbers::pi;

// smooth positive first curvature with decaying envelope on a wide box
static VectorField frenet_data(int n, int N, double L, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    VectorField f = random_field(n - 1, N, L, rng, 0.25, 4, true);
    for (int m = 0; m < N; ++m) f[0].v[m] += 1.0;  // kappa bounded away from 0
    return f;
}

TEST_CASE("n=3 constant curvature and torsion: classical closed form") {
    const int N = 256;
    const double L = 20.0, kappa = 1.3, tau = 0.7;
    VectorField f(2, GridFunction(N, L));
    for (int m = 0; m < N; ++m) {
        f[0].v[m] = kappa;
        f[1].v[m] = tau;
    }
    auto [u, th] = natural_from_frenet(3, f);
    for (int m = 0; m < N; ++m) {
        double x = f[0].x(m);
        CHECK(std::abs(u[0].v[m] - kappa * std::cos(tau * x)) < 1e-8);
        CHECK(std::abs(u[1].v[m] - kappa * std::sin(tau * x)) < 1e-8);
    }
    // dedicated n=3 closed form agrees
    auto [re, im] = hasimoto_n3(f[0], f[1]);
    for (int m = 0; m < N; ++m) {
        CHECK(std::abs(re.v[m] - u[0].v[m]) < 1e-10);
        CHECK(std::abs(im.v[m] - u[1].v[m]) < 1e-10);
    }
}

TEST_CASE("zero higher curvatures: identity transform") {
    const int N = 128;
    const double L = 30.0;
    for (int n : {3, 4}) {
        VectorField f(n - 1, GridFunction(N, L));
        for (int m = 0; m < N; ++m)
            f[0].v[m] = 1.0 + 0.3 * std::exp(-std::pow((f[0].x(m) - L / 2) / 4.0, 2));
        auto [u, th] = natural_from_frenet(n, f);
        for (int m = 0; m < N; ++m) {
            CHECK(std::abs(u[0].v[m] - f[0].v[m]) < 1e-12);
            for (int c = 1; c < n - 1; ++c) CHECK(std::abs(u[c].v[m]) < 1e-12);
        }
    }
}

TEST_CASE("gauge residual of the frame rotation is small") {
    const int N = 256;
    const double L = 40.0;
    for (int n : {4, 5}) {
        VectorField f = frenet_data(n, N, L, 100 + n);
        auto [u, th] = natural_from_frenet(n, f);
        CHECK(gauge_residual(f, u, th) < 1e-6);
    }
}

// periodic natural curvatures synthesized from prescribed first-tier angles
// (theta_23 winds once around the circle) and a positive modulus
static VectorField synthetic_natural(int n, int N, double L, AngleField& tha) {
    const int m = n - 1;
    tha = AngleField(n, N, L);
    GridFunction ub1(N, L);
    for (int g = 0; g < N; ++g) {
        double x = ub1.x(g);
        ub1.v[g] = 1 + 0.2 * std::cos(x);
        tha.theta[tha.index(2, 3)].v[g] = x + 0.2 * std::sin(x);
        tha.theta[tha.index(2, 4)].v[g] = 0.6 + 0.1 * std::cos(x);
        if (n >= 5) tha.theta[tha.index(2, 5)].v[g] = 0.15 * std::cos(2 * x) + 0.1 * std::sin(x);
    }
    VectorField u(m, GridFunction(N, L));
    for (int g = 0; g < N; ++g) {
        auto c2 = [&](int j) { return std::cos(tha.theta[tha.index(2, j)].v[g]); };
        auto s2 = [&](int j) { return std::sin(tha.theta[tha.index(2, j)].v[g]); };
        for (int k = 1; k <= m; ++k) {
            double val = ub1.v[g];
            if (k == 1) {
                val *= c2(3);
                for (int j = 4; j <= n; ++j) val *= c2(j);
            } else if (k == 2) {
                val *= s2(3);
                for (int j = 4; j <= n; ++j) val *= c2(j);
            } else {
                val *= s2(k + 1);
                for (int j = k + 2; j <= n; ++j) val *= c2(j);
            }
            u[k - 1].v[g] = val;
        }
    }
    return u;
}

TEST_CASE("round trip natural -> Frenet -> natural") {
    const int N = 256;
    const double L = 2 * pi;
    for (int n : {4, 5}) {
        AngleField tha(n, N, L);
        VectorField u = synthetic_natural(n, N, L, tha);
        auto [th2, ubar] = angles_from_natural(n, u);
        std::vector<double> th0(th2.count());
        for (int q = 0; q < th2.count(); ++q) th0[q] = th2.theta[q].v[0];
        auto [u3, th3] = natural_from_frenet(n, ubar, th0);
        double worst = 0;
        for (int c = 0; c < n - 1; ++c)
            for (int m = 0; m < N; ++m)
                worst = std::max(worst, std::abs(u3[c].v[m] - u[c].v[m]));
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("positivity and gimbal-lock error paths") {
    const int N = 128;
    const double L = 10.0;
    VectorField f(2, GridFunction(N, L));
    // kappa crosses zero -> PositivityLoss on the forward transform
    for (int m = 0; m < N; ++m) {
        f[0].v[m] = std::sin(2 * pi * m / N);
        f[1].v[m] = 0.1;
    }
    CHECK_THROWS_AS(natural_from_frenet(3, f), PositivityLoss);
    // vanishing modulus -> PositivityLoss on the inverse transform
    VectorField u(2, GridFunction(N, L, 0.0));
    CHECK_THROWS_AS(angles_from_natural(3, u), PositivityLoss);
    // starting an n=4 integration at theta_24 = pi/2 stalls the angle ODE
    VectorField f4 = frenet_data(4, N, 40.0, 42);
    CHECK_THROWS_AS(natural_from_frenet(4, f4, {0.0, pi / 2, 0.0}), GimbalLock);
}
