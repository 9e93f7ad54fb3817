#pragma once

// The three structural operators on curvature fields with n-1 components:
//   I = Dx + u Dxi u^T                                      (symplectic)
//   H = Dx + sum_{i<j} J_ij u Dxi <J_ij u, .>               (cosymplectic)
//   R = Dx^2 + <u,u> + u_1 Dxi <u, .> - sum J_ij u Dxi <J_ij u_1, .> = H I
// plus the hierarchy S_{k+1} = R S_k and the numerical property checks.

#include <cstdint>
#include <functional>
#include <random>

#include "vmkdv/divergence.hpp"
#include "vmkdv/evaluate.hpp"

namespace vmkdv {

using VectorExpression = std::vector<Expression>;

inline bool all_local(const VectorExpression& v) {
    for (auto& c : v)
        if (!c.is_local()) return false;
    return true;
}

inline VectorExpression fam_vec(Family f, int n, int order = 0) {
    VectorExpression v;
    for (int c = 1; c < n; ++c) v.push_back(jet(f, c, order));
    return v;
}

inline Expression inner_expr(const VectorExpression& a, const VectorExpression& b) {
    Expression s;
    for (size_t c = 0; c < a.size(); ++c) s += a[c] * b[c];
    return s;
}

// skew generator J_ij (1-based, 1 <= i < j <= n-1) acting on a component vector
inline VectorExpression J_apply(int i, int j, const VectorExpression& v) {
    VectorExpression out(v.size());
    out[i - 1] = v[j - 1];
    out[j - 1] = -v[i - 1];
    return out;
}

// scalar differential operator sum_k coeff[k] * Dx^k
using DiffOp = std::vector<Expression>;

struct Tail {
    VectorExpression left, right;
    int sign = 1;  // contributes sign * left * Dxi(<right, .>)
};

struct WeaklyNonlocalOperator {
    int n = 2;
    std::vector<std::vector<DiffOp>> local;  // (n-1) x (n-1)
    std::vector<Tail> tails;
};

inline WeaklyNonlocalOperator diag_operator(int n, DiffOp d) {
    WeaklyNonlocalOperator op;
    op.n = n;
    int m = n - 1;
    op.local.assign(m, std::vector<DiffOp>(m));
    for (int r = 0; r < m; ++r) op.local[r][r] = d;
    return op;
}

inline WeaklyNonlocalOperator symplectic_I(int n) {
    auto op = diag_operator(n, {Expression{}, Expression(Rat(1))});  // Dx
    op.tails.push_back({fam_vec(Family::u, n), fam_vec(Family::u, n), +1});
    return op;
}

inline WeaklyNonlocalOperator cosymplectic_H(int n) {
    auto op = diag_operator(n, {Expression{}, Expression(Rat(1))});  // Dx
    auto u = fam_vec(Family::u, n);
    for (int i = 1; i < n - 1; ++i)
        for (int j = i + 1; j <= n - 1; ++j)
            op.tails.push_back({J_apply(i, j, u), J_apply(i, j, u), +1});
    return op;
}

inline WeaklyNonlocalOperator recursion_R(int n, bool drop_uu = false) {
    Expression uu = inner_expr(fam_vec(Family::u, n), fam_vec(Family::u, n));
    auto op = diag_operator(
        n, {drop_uu ? Expression{} : uu, Expression{}, Expression(Rat(1))});
    auto u = fam_vec(Family::u, n);
    auto u1 = fam_vec(Family::u, n, 1);
    op.tails.push_back({u1, u, +1});
    for (int i = 1; i < n - 1; ++i)
        for (int j = i + 1; j <= n - 1; ++j)
            op.tails.push_back({J_apply(i, j, u), J_apply(i, j, u1), -1});
    return op;
}

struct ApplyResult {
    VectorExpression v;
    bool local = true;
};

inline ApplyResult apply(const WeaklyNonlocalOperator& op, const VectorExpression& P) {
    const int m = op.n - 1;
    ApplyResult res;
    res.v.assign(m, Expression{});
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            for (size_t k = 0; k < op.local[r][c].size(); ++k)
                if (!op.local[r][c][k].is_zero())
                    res.v[r] += op.local[r][c][k] * dx_pow(P[c], static_cast<int>(k));
    for (auto& t : op.tails) {
        Expression A = Dxi(inner_expr(t.right, P));
        for (int r = 0; r < m; ++r) res.v[r] += Rat(t.sign) * t.left[r] * A;
    }
    res.local = all_local(res.v);
    return res;
}

// d/de op(u + e*dir)|_0 applied to Q: all u-dependence of the coefficients and
// tail vectors is linear, so the Frechet derivative just swaps u-jets for
// dir-jets factor by factor.
inline VectorExpression apply_directional(const WeaklyNonlocalOperator& op, Family dir,
                                          const VectorExpression& Q) {
    const int m = op.n - 1;
    VectorExpression out(m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            for (size_t k = 0; k < op.local[r][c].size(); ++k)
                if (!op.local[r][c][k].is_zero())
                    out[r] += frechet_derivative(op.local[r][c][k], dir) *
                              dx_pow(Q[c], static_cast<int>(k));
    for (auto& t : op.tails) {
        Expression A = Dxi(inner_expr(t.right, Q));
        VectorExpression dright(m);
        for (int c = 0; c < m; ++c) dright[c] = frechet_derivative(t.right[c], dir);
        Expression dA = Dxi(inner_expr(dright, Q));
        for (int r = 0; r < m; ++r)
            out[r] += Rat(t.sign) *
                      (frechet_derivative(t.left[r], dir) * A + t.left[r] * dA);
    }
    return out;
}

// ---- hierarchy ----

inline std::vector<VectorExpression> hierarchy(int n, int steps) {
    auto R = recursion_R(n);
    std::vector<VectorExpression> S{fam_vec(Family::u, n, 1)};
    for (int k = 1; k <= steps; ++k) {
        ApplyResult next = vmkdv::apply(R, S.back());
        if (!next.local) throw NonlocalHierarchyMember(k);
        S.push_back(std::move(next.v));
    }
    return S;
}

// ---- numeric application ----

// Dx^{-1} convention: periodic = zero-mean spectral antiderivative of the
// mean-projected argument; line = cumulative antiderivative anchored at the
// left edge (for decaying data on a wide box, where Dxi Dx = id must be exact).
enum class DxiMode { periodic, line };

inline VectorField apply_numeric(const WeaklyNonlocalOperator& op, const VectorField& u,
                                 const VectorField& P, DxiMode mode = DxiMode::periodic) {
    const int m = op.n - 1;
    const int N = u[0].N();
    const double L = u[0].L;
    FieldData data{{Family::u, u}};
    Evaluator ev(data, {.project_mean = true});
    auto antider = [&](const GridFunction& f) {
        return mode == DxiMode::line ? line_antiderivative(f) : spectral_antiderivative(f);
    };
    VectorField out(m, GridFunction(N, L));
    std::vector<std::vector<GridFunction>> Pd(m);  // derivative cache
    auto Pderiv = [&](int c, int k) -> const GridFunction& {
        auto& col = Pd[c];
        while (static_cast<int>(col.size()) <= k)
            col.push_back(col.empty() ? P[c] : spectral_derivative(col.back()));
        return col[k];
    };
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            for (size_t k = 0; k < op.local[r][c].size(); ++k) {
                const Expression& coeff = op.local[r][c][k];
                if (coeff.is_zero()) continue;
                out[r] = out[r] + ev(coeff) * Pderiv(c, static_cast<int>(k));
            }
    for (auto& t : op.tails) {
        GridFunction arg(N, L);
        for (int c = 0; c < m; ++c) arg = arg + ev(t.right[c]) * P[c];
        GridFunction A = antider(arg);
        for (int r = 0; r < m; ++r)
            out[r] = out[r] + static_cast<double>(t.sign) * (ev(t.left[r]) * A);
    }
    return out;
}

// ---- random smooth fields ----

// low-mode random Fourier data on [0, L): sum of modes 1..modes with standard
// normal coefficients, scaled by scale/modes; optional Gaussian envelope
// centered at L/2 (for the line convention).
inline VectorField random_field(int ncomp, int N, double L, std::mt19937_64& rng,
                                double scale = 1.0, int modes = 5, bool envelope = false) {
    std::normal_distribution<double> gauss;
    VectorField f;
    for (int c = 0; c < ncomp; ++c) {
        GridFunction g(N, L);
        for (int j = 1; j <= modes; ++j) {
            double a = gauss(rng), b = gauss(rng);
            for (int m = 0; m < N; ++m) {
                double ph = 2 * std::numbers::pi * j * g.x(m) / L;
                g.v[m] += a * std::cos(ph) + b * std::sin(ph);
            }
        }
        for (int m = 0; m < N; ++m) {
            double env = envelope ? std::exp(-std::pow((g.x(m) - L / 2) / (L / 13), 2)) : 1.0;
            g.v[m] *= scale * env / modes;
        }
        f.push_back(std::move(g));
    }
    return f;
}

// ---- symplectic check ----

// cyclic sum <I'[P]Q, h> + <I'[Q]h, P> + <I'[h]P, Q> == 0 modulo divergence
inline Equiv check_symplectic(int n) {
    auto I = symplectic_I(n);
    auto P = fam_vec(Family::P, n), Q = fam_vec(Family::Q, n), h = fam_vec(Family::h, n);
    Expression S = inner_expr(apply_directional(I, Family::P, Q), h) +
                   inner_expr(apply_directional(I, Family::Q, h), P) +
                   inner_expr(apply_directional(I, Family::h, P), Q);
    return equivalent_mod_divergence(S, Expression{});
}

// grid value of the same cyclic integral on random data
inline double symplectic_grid_residual(int n, int N, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double L = 2 * std::numbers::pi;
    auto I = symplectic_I(n);
    FieldData data;
    data[Family::u] = random_field(n - 1, N, L, rng);
    data[Family::P] = random_field(n - 1, N, L, rng);
    data[Family::Q] = random_field(n - 1, N, L, rng);
    data[Family::h] = random_field(n - 1, N, L, rng);
    auto P = fam_vec(Family::P, n), Q = fam_vec(Family::Q, n), h = fam_vec(Family::h, n);
    Expression S = inner_expr(apply_directional(I, Family::P, Q), h) +
                   inner_expr(apply_directional(I, Family::Q, h), P) +
                   inner_expr(apply_directional(I, Family::h, P), Q);
    return std::abs(integral(evaluate_on_grid(S, data, {.project_mean = true})));
}

// ---- Jacobi identity (numeric) ----

inline VectorExpression variational_gradient(const Expression& density, int n) {
    VectorExpression g;
    for (int c = 1; c < n; ++c) g.push_back(euler_component(density, Family::u, c));
    return g;
}

// |{F,{G,H}} + {G,{H,F}} + {H,{F,G}}| with {F,G} = int <dF/du, Op dG/du> dx;
// the outer variational derivative is taken by central differences of the
// inner bracket under pointwise field perturbations. Returns (residual, scale)
// where scale is the magnitude of the inner brackets themselves.
inline std::pair<double, double> check_jacobi_numeric(
    const std::vector<Expression>& densities, const VectorField& u0, int n,
    const std::function<VectorField(const VectorField&, const VectorField&)>& op_apply,
    double eps = 1e-4) {
    const int m = n - 1;
    const int N = u0[0].N();
    const double h = u0[0].dx();
    std::vector<VectorExpression> grads;
    for (auto& d : densities) grads.push_back(variational_gradient(d, n));

    auto grad_at = [&](int which, const VectorField& u) {
        FieldData data{{Family::u, u}};
        Evaluator ev(data, {.project_mean = true});
        VectorField g;
        for (auto& comp : grads[which]) g.push_back(ev(comp));
        return g;
    };
    auto bracket = [&](int a, int b, const VectorField& u) {
        return integral(inner(grad_at(a, u), op_apply(u, grad_at(b, u))));
    };
    auto grad_bracket = [&](int a, int b, const VectorField& u) {
        VectorField g(m, GridFunction(N, u[0].L));
        for (int c = 0; c < m; ++c)
            for (int i = 0; i < N; ++i) {
                VectorField up = u, um = u;
                up[c].v[i] += eps;
                um[c].v[i] -= eps;
                g[c].v[i] = (bracket(a, b, up) - bracket(a, b, um)) / (2 * eps * h);
            }
        return g;
    };
    double tot = 0;
    for (auto [a, b, c] : {std::array{0, 1, 2}, {1, 2, 0}, {2, 0, 1}})
        tot += integral(inner(grad_at(c, u0), op_apply(u0, grad_bracket(a, b, u0))));
    double scale = std::abs(bracket(0, 1, u0)) + std::abs(bracket(1, 2, u0)) +
                   std::abs(bracket(2, 0, u0));
    return {std::abs(tot), scale};
}

// ---- hereditary check (numeric, line convention) ----

// ||N(P,Q) - N(Q,P)||_inf / scale, N(P,Q) = R D_R[P](Q) - D_R[R P](Q), with
// D_R the central finite difference of R in the field u. Run on decaying data
// (Gaussian envelope) over a wide box with the line antiderivative so that
// Dxi Dx = id holds exactly.
inline double check_hereditary_numeric(int n, const VectorField& u, const VectorField& P,
                                       const VectorField& Q, double eps = 1e-5,
                                       bool drop_uu = false) {
    auto R = recursion_R(n, drop_uu);
    auto applyR = [&](const VectorField& uu, const VectorField& f) {
        return apply_numeric(R, uu, f, DxiMode::line);
    };
    const int m = n - 1;
    auto axpy = [&](const VectorField& a, double s, const VectorField& b) {
        VectorField r = a;
        for (int c = 0; c < m; ++c) r[c] = r[c] + s * b[c];
        return r;
    };
    auto DR = [&](const VectorField& dir, const VectorField& g) {
        VectorField p = applyR(axpy(u, eps, dir), g);
        VectorField q = applyR(axpy(u, -eps, dir), g);
        VectorField r(m, GridFunction(u[0].N(), u[0].L));
        for (int c = 0; c < m; ++c) r[c] = (1.0 / (2 * eps)) * (p[c] - q[c]);
        return r;
    };
    auto Nf = [&](const VectorField& A, const VectorField& B) {
        VectorField t1 = applyR(u, DR(A, B));
        VectorField t2 = DR(applyR(u, A), B);
        VectorField r(m, GridFunction(u[0].N(), u[0].L));
        for (int c = 0; c < m; ++c) r[c] = t1[c] - t2[c];
        return r;
    };
    VectorField npq = Nf(P, Q), nqp = Nf(Q, P);
    double scale = std::max(norm_inf(npq), 1e-30);
    VectorField d(m, GridFunction(u[0].N(), u[0].L));
    for (int c = 0; c < m; ++c) d[c] = npq[c] - nqp[c];
    return norm_inf(d) / scale;
}

// ---- NLS-square identity ----

// J = J_12 on two components; -(J(Dx + w Dxi w^T))^2 applied to a formal
// vector equals R for two-component fields, and its scalar restriction
// (second components set to zero) matches the one-component R.
inline bool nls_square_identity() {
    const int n = 3;  // two-component ambient
    auto I = symplectic_I(n);
    auto P = fam_vec(Family::P, n);
    auto JI = [&](const VectorExpression& v) {
        return J_apply(1, 2, vmkdv::apply(I, v).v);
    };
    VectorExpression lhs = JI(JI(P));
    for (auto& c : lhs) c = -c;  // -(J I)^2
    VectorExpression rhs = vmkdv::apply(recursion_R(n), P).v;
    for (int c = 0; c < 2; ++c)
        if (!(lhs[c] == rhs[c])) return false;
    // scalar restriction: drop the second components of u and P
    Expression scalar = substitute_zero(substitute_zero(lhs[0], Family::u, 2), Family::P, 2);
    Expression r2 = vmkdv::apply(recursion_R(2), fam_vec(Family::P, 2)).v[0];
    return scalar == r2;
}

}  // namespace vmkdv
