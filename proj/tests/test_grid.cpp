// Spectral grid layer: FFT, differentiation, antiderivative conventions,
// resampling, CSV round trips, and grid evaluation of expressions.

#include <cmath>
#include <cstdio>
#include <numbers>

#include <catch2/catch_amalgamated.hpp>

#include "vmkdv/evaluate.hpp"
#include "vmkdv/grid.hpp"

using namespace vmkdv;
constexpr double pi = std::numbers::pi;

static GridFunction sample(int N, double L, double (*f)(double)) {
    GridFunction g(N, L);
    for (int m = 0; m < N; ++m) g.v[m] = f(g.x(m));
    return g;
}

TEST_CASE("fft round trip") {
    GridFunction f = sample(64, 2 * pi, [](double x) { return std::exp(std::sin(x)); });
    GridFunction back = from_spectral(to_spectral(f), f.L);
    for (int m = 0; m < f.N(); ++m) CHECK(std::abs(back.v[m] - f.v[m]) < 1e-13);
}

TEST_CASE("spectral derivative of smooth data") {
    GridFunction f = sample(128, 2 * pi, [](double x) { return std::sin(3 * x); });
    GridFunction d = spectral_derivative(f);
    for (int m = 0; m < f.N(); ++m)
        CHECK(std::abs(d.v[m] - 3 * std::cos(3 * f.x(m))) < 1e-11);
    GridFunction d3 = spectral_derivative(f, 3);
    for (int m = 0; m < f.N(); ++m)
        CHECK(std::abs(d3.v[m] + 27 * std::cos(3 * f.x(m))) < 1e-9);
}

TEST_CASE("antiderivative conventions") {
    GridFunction f = sample(128, 2 * pi, [](double x) { return std::cos(2 * x) + 1.5; });
    // periodic convention: mean projected away, output mean zero
    GridFunction F = spectral_antiderivative(f);
    CHECK(std::abs(mean(F)) < 1e-13);
    GridFunction dF = spectral_derivative(F);
    for (int m = 0; m < f.N(); ++m)
        CHECK(std::abs(dF.v[m] - (f.v[m] - 1.5)) < 1e-12);
    // line convention: F' = f exactly (mean kept as a linear ramp), F(0) = 0
    GridFunction G = line_antiderivative(f);
    CHECK(std::abs(G.v[0]) < 1e-13);
    for (int m = 0; m < f.N(); ++m)
        CHECK(std::abs(G.v[m] - (0.5 * std::sin(2 * G.x(m)) + 1.5 * G.x(m))) < 1e-12);
}

TEST_CASE("upsample is trigonometric interpolation") {
    GridFunction f = sample(32, 2 * pi, [](double x) { return std::sin(x) + 0.2 * std::cos(5 * x); });
    GridFunction g = upsample(f, 4);
    for (int m = 0; m < g.N(); ++m) {
        double x = g.x(m);
        CHECK(std::abs(g.v[m] - (std::sin(x) + 0.2 * std::cos(5 * x))) < 1e-12);
    }
}

TEST_CASE("grid size restrictions") {
    CHECK_THROWS_AS(GridFunction(12, 1.0), Error);
    CHECK_THROWS_AS(GridFunction(100, 1.0), Error);
}

TEST_CASE("CSV round trip") {
    VectorField f(2, GridFunction(32, 5.0));
    for (int m = 0; m < 32; ++m) {
        f[0].v[m] = std::sin(2 * pi * m / 32.0);
        f[1].v[m] = m * 0.01;
    }
    std::string path = "roundtrip_test.csv";
    write_csv(path, f);
    VectorField g = read_csv(path);
    std::remove(path.c_str());
    REQUIRE(g.size() == 2);
    CHECK(std::abs(g[0].L - 5.0) < 1e-12);
    for (int m = 0; m < 32; ++m) {
        CHECK(g[0].v[m] == f[0].v[m]);
        CHECK(g[1].v[m] == f[1].v[m]);
    }
}

TEST_CASE("expression evaluation on the grid") {
    const int N = 128;
    FieldData data;
    data[Family::u] = VectorField(2, GridFunction(N, 2 * pi));
    for (int m = 0; m < N; ++m) {
        double x = 2 * pi * m / N;
        data[Family::u][0].v[m] = std::sin(x);
        data[Family::u][1].v[m] = std::cos(2 * x);
    }
    Expression e = uj(1) * uj(1, 1) + uj(2, 2);
    GridFunction g = evaluate_on_grid(e, data);
    for (int m = 0; m < N; ++m) {
        double x = 2 * pi * m / N;
        double want = std::sin(x) * std::cos(x) - 4 * std::cos(2 * x);
        CHECK(std::abs(g.v[m] - want) < 1e-10);
    }
}

TEST_CASE("nonlocal atom evaluation demands zero mean") {
    const int N = 64;
    FieldData data;
    data[Family::u] = VectorField(1, GridFunction(N, 2 * pi, 1.0));
    // <u,u> = 1 has nonzero mean: strict evaluation refuses Dxi
    Expression e = Dxi(uj(1) * uj(1));
    CHECK_THROWS_AS(evaluate_on_grid(e, data), NonzeroMean);
    EvalOptions opt;
    opt.project_mean = true;
    CHECK_NOTHROW(evaluate_on_grid(e, data, opt));
}
