// Symbolic differential-polynomial layer: arithmetic, total derivative,
// Euler operator, formal integration, nonlocal atoms, linearization, parsing.

#include <catch2/catch_amalgamated.hpp>

#include "vmkdv/divergence.hpp"
#include "vmkdv/expr.hpp"
#include "vmkdv/parser.hpp"

using namespace vmkdv;

TEST_CASE("expression arithmetic is exact rational") {
    Expression a = rational(1, 3) * uj(1) + rational(1, 6) * uj(1);
    CHECK(a == rational(1, 2) * uj(1));
    Expression b = uj(1) * uj(2) - uj(2) * uj(1);
    CHECK(b.is_zero());
    Expression c = (uj(1) + uj(2)) * (uj(1) - uj(2));
    CHECK(c == uj(1) * uj(1) - uj(2) * uj(2));
}

TEST_CASE("total derivative is a derivation") {
    Expression f = uj(1) * uj(1) * uj(2, 1);
    Expression g = uj(2) + rational(3) * uj(1, 2);
    Expression lhs = total_derivative(f * g);
    Expression rhs = total_derivative(f) * g + f * total_derivative(g);
    CHECK(lhs == rhs);
    CHECK(total_derivative(rational(7)).is_zero());
    CHECK(total_derivative(uj(1)) == uj(1, 1));
}

TEST_CASE("order cap throws") {
    Expression top = uj(1, max_jet_order);
    CHECK_THROWS_AS(total_derivative(top), MaxOrderExceeded);
}

TEST_CASE("Euler operator annihilates total derivatives") {
    Expression f = uj(1) * uj(1) * uj(1, 1) + uj(2, 2) * uj(1) + rational(5, 7) * uj(2);
    Expression df = total_derivative(f);
    CHECK(euler_component(df, Family::u, 1).is_zero());
    CHECK(euler_component(df, Family::u, 2).is_zero());
    CHECK(is_exact(df));
    // non-exact density
    Expression h = uj(1) * uj(1);
    CHECK(!is_exact(h));
    CHECK(euler_component(h, Family::u, 1) == rational(2) * uj(1));
}

TEST_CASE("Euler operator with higher derivatives") {
    // delta/delta u of 1/2 u_x^2 is -u_xx
    Expression dens = rational(1, 2) * uj(1, 1) * uj(1, 1);
    CHECK(euler_component(dens, Family::u, 1) == -uj(1, 2));
}

TEST_CASE("formal integration inverts the total derivative") {
    Expression f = uj(1) * uj(1) * uj(2, 1) + uj(1, 3) + rational(2, 3) * uj(2) * uj(2, 2);
    Expression df = total_derivative(f);
    auto F = formal_integrate(df);
    REQUIRE(F.has_value());
    CHECK(total_derivative(*F) == df);
    // a non-exact expression has no formal integral
    CHECK(!formal_integrate(uj(1) * uj(1)).has_value());
}

TEST_CASE("split_exact: exact part plus canonical remainder") {
    Expression ex = total_derivative(uj(1) * uj(1, 1));
    Expression rem = uj(1) * uj(1) * uj(1);
    auto [F, r] = split_exact(ex + rem);
    CHECK(total_derivative(F) + r == ex + rem);
    CHECK(is_exact(ex + rem - r));
}

TEST_CASE("Dxi resolves exact arguments and keeps a canonical remainder") {
    // Dxi(u u_x) = u^2/2 exactly
    Expression e = Dxi(uj(1) * uj(1, 1));
    CHECK(e == rational(1, 2) * uj(1) * uj(1));
    // Dxi of a non-exact argument stays a nonlocal atom
    Expression a = Dxi(uj(1) * uj(1));
    CHECK(a != rational(1, 2) * uj(1) * uj(1));
    CHECK(total_derivative(a) == uj(1) * uj(1));
}

TEST_CASE("Dxi obeys the fundamental theorem under total_derivative") {
    Expression g = uj(1) * uj(2) + uj(2, 1) * uj(2, 1);
    CHECK(total_derivative(Dxi(g)) == g);
}

TEST_CASE("nonlocal products: perfect-square and pairing rules") {
    Expression g = uj(1) * uj(1);
    Expression A = Dxi(g);
    // g * A(g) = 1/2 Dx(A(g)^2) is exact: Dxi resolves it without nesting
    Expression e = Dxi(g * A);
    CHECK(e == rational(1, 2) * A * A);
    // genuinely nested atoms are refused
    Expression bad = A * A * g;
    CHECK_THROWS_AS(Dxi(bad), NestingDepth);
}

TEST_CASE("Frechet derivative: linearity and Leibniz") {
    Expression e = uj(1) * uj(1) * uj(1, 1);
    Expression d = frechet_derivative(e, Family::P);
    // D_u[u^2 u_x](P) = 2 u P u_x + u^2 P_x
    Expression want = rational(2) * uj(1) * jet(Family::P, 1) * uj(1, 1) +
                      uj(1) * uj(1) * jet(Family::P, 1, 1);
    CHECK(d == want);
}

TEST_CASE("substitute_zero and rename_family") {
    Expression e = uj(1) * uj(2) + uj(2, 1) + uj(1, 3);
    CHECK(substitute_zero(e, Family::u, 2) == uj(1, 3));
    Expression r = rename_family(uj(1) * uj(1, 2), Family::u, Family::Q);
    CHECK(r == jet(Family::Q, 1) * jet(Family::Q, 1, 2));
}

TEST_CASE("equivalence modulo divergences") {
    // u u_xx ~ -u_x u_x  (integrate by parts)
    Expression a = uj(1) * uj(1, 2);
    Expression b = -uj(1, 1) * uj(1, 1);
    CHECK(equivalent_mod_divergence(a, b) == Equiv::True);
    CHECK(equivalent_mod_divergence(uj(1) * uj(1), Expression()) == Equiv::False);
}

TEST_CASE("printer/parser round trip") {
    Expression e = uj(1, 3) + rational(3, 2) * uj(1) * uj(1) * uj(1, 1) -
                   rational(5, 7) * uj(2) * uj(2, 2) + Dxi(uj(1) * uj(1));
    Expression back = parse(print(e), 3);
    CHECK(back == e);
}

TEST_CASE("parser understands inner-product sugar") {
    Expression e = parse("<u,u>", 4);
    Expression want = uj(1) * uj(1) + uj(2) * uj(2) + uj(3) * uj(3);
    CHECK(e == want);
    CHECK(parse("u[2]'1^2", 3) == uj(2, 1) * uj(2, 1));
}
