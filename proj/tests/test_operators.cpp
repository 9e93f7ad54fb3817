// Structural operators: hierarchy golden values, factorization, adjointness,
// symplectic/Jacobi/hereditary checks with seeded data and negative controls.

#include <numbers>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "vmkdv/evaluate.hpp"
#include "vmkdv/operators.hpp"
#include "vmkdv/parser.hpp"

using namespace vmkdv;
constexpr double pi = std::numbers::pi;

TEST_CASE("S0 and S1 golden members") {
    for (int n = 2; n <= 4; ++n) {
        auto hs = hierarchy(n, 1);
        // S0 is the translation flow u_x
        for (int c = 0; c < n - 1; ++c) CHECK(hs[0][c] == uj(c + 1, 1));
        // S1 = u_3 + 3/2 <u,u> u_1
        VectorExpression u = fam_vec(Family::u, n), u1 = fam_vec(Family::u, n, 1);
        Expression uu = inner_expr(u, u);
        for (int c = 0; c < n - 1; ++c)
            CHECK(hs[1][c] == uj(c + 1, 3) + rational(3, 2) * uu * uj(c + 1, 1));
    }
}

TEST_CASE("S2 scalar reduction matches the 5th-order mKdV symmetry") {
    auto hs = hierarchy(2, 2);
    Expression want = parse(
        "u[1]'5 + 5/2*u[1]^2*u[1]'3 + 10*u[1]*u[1]'1*u[1]'2 + 5/2*u[1]'1^3 + "
        "15/8*u[1]^4*u[1]'1", 2);
    CHECK(hs[2][0] == want);
}

TEST_CASE("recursion operator factors through the Hamiltonian pair") {
    // R P = H (I P) exactly, for a generic local vector P
    const int n = 3;
    VectorExpression P = fam_vec(Family::P, n);
    ApplyResult ip = vmkdv::apply(symplectic_I(n), P);
    ApplyResult hip = vmkdv::apply(cosymplectic_H(n), ip.v);
    ApplyResult rp = vmkdv::apply(recursion_R(n), P);
    for (int c = 0; c < n - 1; ++c) CHECK(hip.v[c] == rp.v[c]);
}

TEST_CASE("symplectic verdict is symbolic for n = 2..5") {
    for (int n = 2; n <= 5; ++n) CHECK(check_symplectic(n) == Equiv::True);
}

TEST_CASE("two-component square identity") { CHECK(nls_square_identity()); }

TEST_CASE("operators are skew-adjoint on periodic data") {
    const int n = 4, N = 128;
    const double L = 2 * pi;
    std::mt19937_64 rng(11);
    VectorField u = random_field(n - 1, N, L, rng, 0.7);
    VectorField P = random_field(n - 1, N, L, rng, 0.7);
    VectorField Q = random_field(n - 1, N, L, rng, 0.7);
    for (auto* op : {&symplectic_I, &cosymplectic_H}) {
        VectorField oP = apply_numeric((*op)(n), u, P);
        VectorField oQ = apply_numeric((*op)(n), u, Q);
        double lhs = integral(inner(Q, oP)), rhs = integral(inner(P, oQ));
        CHECK(std::abs(lhs + rhs) < 1e-8);
    }
}

TEST_CASE("Frechet linearization agrees with finite differences") {
    const int N = 128;
    const double L = 2 * pi;
    std::mt19937_64 rng(5);
    VectorField u = random_field(2, N, L, rng, 0.8);
    VectorField P = random_field(2, N, L, rng, 0.8);
    Expression e = uj(1) * uj(1) * uj(2, 1) + uj(1, 2) * uj(2);
    Expression de = frechet_derivative(e, Family::P);
    FieldData data{{Family::u, u}, {Family::P, P}};
    GridFunction sym = evaluate_on_grid(de, data);
    const double eps = 1e-6;
    VectorField up = u, um = u;
    for (int c = 0; c < 2; ++c)
        for (int m = 0; m < N; ++m) {
            up[c].v[m] += eps * P[c].v[m];
            um[c].v[m] -= eps * P[c].v[m];
        }
    GridFunction fp = evaluate_on_grid(e, {{Family::u, up}});
    GridFunction fm = evaluate_on_grid(e, {{Family::u, um}});
    for (int m = 0; m < N; ++m)
        CHECK(std::abs(sym.v[m] - (fp.v[m] - fm.v[m]) / (2 * eps)) < 1e-6);
}

TEST_CASE("first two symmetries commute on the grid") {
    const int N = 128;
    const double L = 2 * pi;
    std::mt19937_64 rng(23);
    VectorField u = random_field(2, N, L, rng, 0.7);
    auto hs = hierarchy(3, 2);
    auto flow = [&](const VectorExpression& S, const VectorField& at) {
        VectorField out;
        for (auto& comp : S) out.push_back(evaluate_on_grid(comp, {{Family::u, at}}));
        return out;
    };
    // [S1, S2](u) = DS1(u)[S2(u)] - DS2(u)[S1(u)] by central differences
    const double eps = 1e-6;
    auto directional = [&](const VectorExpression& S, const VectorField& dir) {
        VectorField up = u, um = u;
        for (int c = 0; c < 2; ++c)
            for (int m = 0; m < N; ++m) {
                up[c].v[m] += eps * dir[c].v[m];
                um[c].v[m] -= eps * dir[c].v[m];
            }
        VectorField a = flow(S, up), b = flow(S, um);
        for (int c = 0; c < 2; ++c)
            for (int m = 0; m < N; ++m) a[c].v[m] = (a[c].v[m] - b[c].v[m]) / (2 * eps);
        return a;
    };
    VectorField s1 = flow(hs[1], u), s2 = flow(hs[2], u);
    VectorField d12 = directional(hs[1], s2), d21 = directional(hs[2], s1);
    double worst = 0, scale = std::max(norm_inf(s1), norm_inf(s2));
    for (int c = 0; c < 2; ++c)
        for (int m = 0; m < N; ++m)
            worst = std::max(worst, std::abs(d12[c].v[m] - d21[c].v[m]));
    CHECK(worst < 1e-4 * scale);
}

TEST_CASE("hereditary defect with negative control, one seed") {
    const int n = 3, N = 256;
    const double L = 40.0;
    std::mt19937_64 rng(7);
    VectorField u = random_field(n - 1, N, L, rng, 1.0, 6, true);
    VectorField P = random_field(n - 1, N, L, rng, 1.0, 6, true);
    VectorField Q = random_field(n - 1, N, L, rng, 1.0, 6, true);
    CHECK(check_hereditary_numeric(n, u, P, Q) < 1e-6);
    CHECK(check_hereditary_numeric(n, u, P, Q, 1e-5, true) > 1e-2);
}

TEST_CASE("Jacobi identity with negative control, one seed") {
    const int n = 3, N = 128;
    const double L = 2 * pi;
    std::mt19937_64 rng(3);
    VectorExpression u = fam_vec(Family::u, n), u1 = fam_vec(Family::u, n, 1);
    std::vector<Expression> dens = {Rat(1) / 2 * inner_expr(u, u),
                                    Rat(1) / 2 * inner_expr(u1, u1),
                                    Rat(1) / 4 * inner_expr(u, u) * inner_expr(u, u)};
    VectorField u0 = random_field(n - 1, N, L, rng, 0.8);
    auto H = cosymplectic_H(n);
    auto [res, scale] = check_jacobi_numeric(dens, u0, n,
        [&](const VectorField& ub, const VectorField& g) {
            return apply_numeric(H, ub, g);
        });
    CHECK(res < 1e-6 * scale);
    // non-Hamiltonian control: multiply the operator output by <u,u>
    auto [bad, bscale] = check_jacobi_numeric(dens, u0, n,
        [&](const VectorField& ub, const VectorField& g) {
            VectorField r = apply_numeric(H, ub, g);
            GridFunction w = inner(ub, ub);
            for (auto& c : r) c = c * w;
            return r;
        });
    CHECK(bad > 1e3 * 1e-6 * bscale);
}

TEST_CASE("locality bookkeeping of weakly nonlocal application") {
    // the symplectic operator applied to a generic argument is nonlocal ...
    ApplyResult ip = vmkdv::apply(symplectic_I(3), fam_vec(Family::P, 3));
    CHECK(!ip.local);
    // ... while the true recursion operator keeps hierarchy members local;
    // dropping its local <u,u> term loses that after two applications
    auto S1 = hierarchy(3, 1)[1];
    ApplyResult r1 = vmkdv::apply(recursion_R(3, true), S1);
    REQUIRE(r1.local);
    ApplyResult r2 = vmkdv::apply(recursion_R(3, true), r1.v);
    CHECK(!r2.local);
}
