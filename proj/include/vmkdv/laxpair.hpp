#pragma once

// so(n+1)-valued Lax pair for vmKdV:
//   L = L01 + lambda L10,  M = M3 + lambda M2 + lambda^2 M1 + lambda^3 M0
// with
//   M0 = -L10,  M1 = -L01,  M2 = -[L10, Dx L01] + beta L10,
//   M3 = Dx^2 L01 + beta L01 + X00,  X00 = -[L01, Dx L01],
//   beta = nu + 1/2 <u,u>.
// Zero curvature: F = Dx M - Dt L + [L, M] = 0 order by order in lambda.

#include <array>
#include <vector>

#include "vmkdv/curveflow.hpp"
#include "vmkdv/operators.hpp"

namespace vmkdv {

// ---- symbolic matrices ----

struct SoMatrix {
    int dim = 0;
    std::vector<Expression> a;  // row-major dim x dim

    explicit SoMatrix(int d = 0) : dim(d), a(d * d) {}
    Expression& at(int r, int c) { return a[r * dim + c]; }
    const Expression& at(int r, int c) const { return a[r * dim + c]; }

    bool is_zero() const {
        for (auto& e : a)
            if (!e.is_zero()) return false;
        return true;
    }
    bool is_skew() const {
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c)
                if (!((at(r, c) + at(c, r)).is_zero())) return false;
        return true;
    }
};

// phi embedding: [[0, v^T], [-v, omega]] with v of length n, omega n x n skew
inline SoMatrix embed_phi(const std::vector<Expression>& v,
                          const std::vector<std::vector<Expression>>& omega) {
    const int n = static_cast<int>(v.size());
    SoMatrix M(n + 1);
    for (int i = 0; i < n; ++i) {
        M.at(0, i + 1) = v[i];
        M.at(i + 1, 0) = -v[i];
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!omega.empty()) M.at(i + 1, j + 1) = omega[i][j];
    return M;
}

inline SoMatrix L01_sym(int n) {
    SoMatrix M(n + 1);
    for (int i = 0; i < n - 1; ++i) {
        M.at(1, i + 2) = uj(i + 1);
        M.at(i + 2, 1) = -uj(i + 1);
    }
    return M;
}

inline SoMatrix L10_sym(int n) {
    SoMatrix M(n + 1);
    M.at(0, 1) = Expression(Rat(1));
    M.at(1, 0) = -Expression(Rat(1));
    return M;
}

inline SoMatrix mat_dx(const SoMatrix& A, int order = 1) {
    SoMatrix R(A.dim);
    for (size_t q = 0; q < A.a.size(); ++q) R.a[q] = dx_pow(A.a[q], order);
    return R;
}

inline SoMatrix mat_mul(const SoMatrix& A, const SoMatrix& B) {
    SoMatrix R(A.dim);
    for (int r = 0; r < A.dim; ++r)
        for (int c = 0; c < A.dim; ++c)
            for (int k = 0; k < A.dim; ++k) R.at(r, c) += A.at(r, k) * B.at(k, c);
    return R;
}

inline SoMatrix comm(const SoMatrix& A, const SoMatrix& B) {
    SoMatrix R(A.dim);
    SoMatrix AB = mat_mul(A, B), BA = mat_mul(B, A);
    for (size_t q = 0; q < R.a.size(); ++q) R.a[q] = AB.a[q] - BA.a[q];
    return R;
}

inline SoMatrix operator+(SoMatrix A, const SoMatrix& B) {
    for (size_t q = 0; q < A.a.size(); ++q) A.a[q] += B.a[q];
    return A;
}
inline SoMatrix operator-(SoMatrix A, const SoMatrix& B) {
    for (size_t q = 0; q < A.a.size(); ++q) A.a[q] -= B.a[q];
    return A;
}
inline SoMatrix operator*(const Expression& s, SoMatrix A) {
    for (auto& e : A.a) e = s * e;
    return A;
}

inline Expression trace(const SoMatrix& A) {
    Expression t;
    for (int r = 0; r < A.dim; ++r) t += A.at(r, r);
    return t;
}

// Z/2 x Z/2 grading of an entry position of so(n+1): first grading from the
// (1, n) partition {row/col 0 | rest}, second from the (2, n-1) partition
// {rows/cols 0,1 | rest}.
inline std::pair<int, int> entry_grading(int r, int c) {
    return {(r == 0) != (c == 0), (r <= 1) != (c <= 1)};
}

inline bool has_grading(const SoMatrix& A, int g1, int g2) {
    for (int r = 0; r < A.dim; ++r)
        for (int c = 0; c < A.dim; ++c)
            if (!A.at(r, c).is_zero() && entry_grading(r, c) != std::pair{g1, g2})
                return false;
    return true;
}

// ---- M coefficients ----

struct LaxPolynomial {
    int n = 3;
    SoMatrix L01, L10;          // L = L01 + lambda L10
    std::array<SoMatrix, 4> M;  // M = M[3] + lambda M[2] + lambda^2 M[1] + lambda^3 M[0]
};

inline LaxPolynomial build_M(int n, const Rat& nu) {
    LaxPolynomial P;
    P.n = n;
    P.L01 = L01_sym(n);
    P.L10 = L10_sym(n);
    Expression uu = inner_expr(fam_vec(Family::u, n), fam_vec(Family::u, n));
    Expression beta = Expression(nu) + Rat(1) / 2 * uu;
    SoMatrix dL01 = mat_dx(P.L01);
    P.M[0] = Expression(Rat(-1)) * P.L10;
    P.M[1] = Expression(Rat(-1)) * P.L01;
    P.M[2] = (Expression(Rat(-1)) * comm(P.L10, dL01)) + beta * P.L10;
    SoMatrix X00 = Expression(Rat(-1)) * comm(P.L01, dL01);
    P.M[3] = mat_dx(P.L01, 2) + beta * P.L01 + X00;
    return P;
}

// Dt of L01 under u_t = u_3 + (nu + 3/2 <u,u>) u_1
inline SoMatrix Dt_L01(int n, const Rat& nu) {
    SoMatrix M(n + 1);
    Expression uu = inner_expr(fam_vec(Family::u, n), fam_vec(Family::u, n));
    for (int i = 0; i < n - 1; ++i) {
        Expression ut = uj(i + 1, 3) + (Expression(nu) + Rat(3) / 2 * uu) * uj(i + 1, 1);
        M.at(1, i + 2) = ut;
        M.at(i + 2, 1) = -ut;
    }
    return M;
}

// ---- symbolic lambda-order identities ----

struct LambdaReport {
    std::array<bool, 5> order_ok{};  // index = power of lambda (0..4)
    bool ad_identity_ok = false;     // ad(L01) ad(Dx L01) on span{L10, L01}
    bool killing_ok = false;         // K(L01, L01) = -2(n-2)<u,u>
    bool all() const {
        for (bool b : order_ok)
            if (!b) return false;
        return ad_identity_ok && killing_ok;
    }
};

// Killing form of so(n+1) normalized so that K(L01, L01) = -2(n-2)<u,u>
inline Expression killing_form(const SoMatrix& X, const SoMatrix& Y, int n) {
    return Rat(n - 2) * trace(mat_mul(X, Y));
}

inline bool killing_check(int n) {
    SoMatrix l01 = L01_sym(n);
    Expression uu = inner_expr(fam_vec(Family::u, n), fam_vec(Family::u, n));
    return killing_form(l01, l01, n) == Rat(-2 * (n - 2)) * uu;
}

inline LambdaReport lambda_identities(int n, const Rat& nu) {
    LambdaReport rep;
    LaxPolynomial P = build_M(n, nu);
    const auto& l01 = P.L01;
    const auto& l10 = P.L10;
    // F = Dx M - Dt L + [L, M]; L = L01 + lambda L10 with Dt L10 = 0
    rep.order_ok[4] = comm(l10, P.M[0]).is_zero();
    rep.order_ok[3] = (mat_dx(P.M[0]) + comm(l01, P.M[0]) + comm(l10, P.M[1])).is_zero();
    rep.order_ok[2] = (mat_dx(P.M[1]) + comm(l01, P.M[1]) + comm(l10, P.M[2])).is_zero();
    rep.order_ok[1] = (mat_dx(P.M[2]) + comm(l01, P.M[2]) + comm(l10, P.M[3])).is_zero();
    rep.order_ok[0] = (mat_dx(P.M[3]) + comm(l01, P.M[3]) - Dt_L01(n, nu)).is_zero();

    // ad(L01) ad(Dx L01) X = <u,u> Dx X - <u,u1> X for X in {L10, L01}
    Expression uu = inner_expr(fam_vec(Family::u, n), fam_vec(Family::u, n));
    Expression uu1 = inner_expr(fam_vec(Family::u, n), fam_vec(Family::u, n, 1));
    SoMatrix dl01 = mat_dx(l01);
    bool ok = true;
    for (const SoMatrix* X : {&l10, &l01}) {
        SoMatrix lhs = comm(l01, comm(dl01, *X));
        SoMatrix rhs = uu * mat_dx(*X) - uu1 * (*X);
        ok = ok && (lhs - rhs).is_zero();
    }
    rep.ad_identity_ok = ok;
    rep.killing_ok = killing_check(n);
    return rep;
}

// ---- numeric zero-curvature residual ----

namespace detail {

// numeric (n+1)x(n+1) matrix field from curvature samples
inline MatSeries L01_num(const VectorField& u) {
    const int m = static_cast<int>(u.size());
    const int n = m + 1, d = n + 1;
    const int N = u[0].N();
    MatSeries A(N, std::vector<double>(d * d, 0.0));
    for (int g = 0; g < N; ++g)
        for (int i = 0; i < m; ++i) {
            A[g][1 * d + (i + 2)] = u[i].v[g];
            A[g][(i + 2) * d + 1] = -u[i].v[g];
        }
    return A;
}

inline MatSeries mat_dx_num(const MatSeries& A, int d, double L, int order = 1) {
    const int N = static_cast<int>(A.size());
    MatSeries R(N, std::vector<double>(d * d, 0.0));
    GridFunction col(N, L);
    for (int q = 0; q < d * d; ++q) {
        for (int g = 0; g < N; ++g) col.v[g] = A[g][q];
        GridFunction dc = spectral_derivative(col, order);
        for (int g = 0; g < N; ++g) R[g][q] = dc.v[g];
    }
    return R;
}

inline void comm_into(const std::vector<double>& A, const std::vector<double>& B, int d,
                      std::vector<double>& out) {
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            double s = 0;
            for (int k = 0; k < d; ++k)
                s += A[r * d + k] * B[k * d + c] - B[r * d + k] * A[k * d + c];
            out[r * d + c] = s;
        }
}

struct NumLax {
    MatSeries L, M;
    int d;
};

inline NumLax build_LM_num(const VectorField& u, double lam, double nu) {
    const int m = static_cast<int>(u.size());
    const int n = m + 1, d = n + 1;
    const int N = u[0].N();
    const double L = u[0].L;
    MatSeries l01 = L01_num(u);
    MatSeries dl01 = mat_dx_num(l01, d, L);
    MatSeries d2l01 = mat_dx_num(l01, d, L, 2);
    GridFunction uu = inner(u, u);
    NumLax out;
    out.d = d;
    out.L.assign(N, std::vector<double>(d * d, 0.0));
    out.M.assign(N, std::vector<double>(d * d, 0.0));
    std::vector<double> t1(d * d), t2(d * d);
    for (int g = 0; g < N; ++g) {
        double beta = nu + 0.5 * uu.v[g];
        std::vector<double> l10(d * d, 0.0);
        l10[0 * d + 1] = 1.0;
        l10[1 * d + 0] = -1.0;
        for (int q = 0; q < d * d; ++q) out.L[g][q] = l01[g][q] + lam * l10[q];
        comm_into(l10, dl01[g], d, t1);   // [L10, Dx L01]
        comm_into(l01[g], dl01[g], d, t2);  // [L01, Dx L01]
        for (int q = 0; q < d * d; ++q) {
            double M0 = -l10[q];
            double M1 = -l01[g][q];
            double M2 = -t1[q] + beta * l10[q];
            double M3 = d2l01[g][q] + beta * l01[g][q] - t2[q];
            out.M[g][q] = M3 + lam * M2 + lam * lam * M1 + lam * lam * lam * M0;
        }
    }
    return out;
}

}  // namespace detail

struct ZeroCurvatureRow {
    double lambda, t, residual;
};

// max-norm of F = Dx M - Dt L + [L, M] along stored snapshots; Dt by 4th-order
// central differences over 5 consecutive uniformly spaced time levels.
inline std::vector<ZeroCurvatureRow> zero_curvature_residual(
    const FlowTrajectory& traj, const std::vector<double>& lambdas, double nu = 0.0) {
    const auto& snaps = traj.snapshots;
    if (snaps.size() < 5) throw InsufficientSnapshots();
    const int m = static_cast<int>(snaps[0].size());
    const int n = m + 1, d = n + 1;
    const int N = snaps[0][0].N();
    const double L = snaps[0][0].L;
    const double dt = traj.times[1] - traj.times[0];
    std::vector<ZeroCurvatureRow> rows;
    std::vector<double> c1(d * d);
    for (double lam : lambdas)
        for (size_t j = 2; j + 2 < snaps.size(); ++j) {
            detail::NumLax lm = detail::build_LM_num(snaps[j], lam, nu);
            MatSeries dxM = detail::mat_dx_num(lm.M, d, L);
            // Dt u at snapshot j
            VectorField dtu(m, GridFunction(N, L));
            for (int c = 0; c < m; ++c)
                for (int g = 0; g < N; ++g)
                    dtu[c].v[g] = (snaps[j - 2][c].v[g] - 8 * snaps[j - 1][c].v[g] +
                                   8 * snaps[j + 1][c].v[g] - snaps[j + 2][c].v[g]) /
                                  (12 * dt);
            MatSeries dtL = detail::L01_num(dtu);
            double worst = 0;
            for (int g = 0; g < N; ++g) {
                detail::comm_into(lm.L[g], lm.M[g], d, c1);
                for (int q = 0; q < d * d; ++q)
                    worst = std::max(worst, std::abs(dxM[g][q] - dtL[g][q] + c1[q]));
            }
            rows.push_back({lam, traj.times[j], worst});
        }
    return rows;
}

}  // namespace vmkdv
