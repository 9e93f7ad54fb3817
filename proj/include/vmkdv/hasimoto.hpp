#pragma once

// Generalized Hasimoto transformation: conversion between Frenet curvatures
// ubar^(1..n-1) and natural-frame curvatures u^(1..n-1) through the Euler
// angle field theta_ij (2 <= i < j <= n), plus the gauge identity
//   omega_F R - Dx R - R omega_N = 0
// with omega_F skew tridiagonal (superdiagonal ubar) and omega_N carrying u in
// its first row/column.

#include <array>
#include <cmath>
#include <vector>

#include "vmkdv/grid.hpp"

namespace vmkdv {

constexpr double kGimbalTol = 1e-8;

// angles theta_ij, 2 <= i < j <= n, stored in (i-major, j-minor) order
struct AngleField {
    int n = 3;
    std::vector<std::pair<int, int>> pairs;
    VectorField theta;  // one GridFunction per pair

    explicit AngleField(int n_, int N, double L) : n(n_) {
        for (int i = 2; i < n; ++i)
            for (int j = i + 1; j <= n; ++j) pairs.emplace_back(i, j);
        theta.assign(pairs.size(), GridFunction(N, L));
    }
    int index(int i, int j) const {
        for (size_t q = 0; q < pairs.size(); ++q)
            if (pairs[q] == std::pair{i, j}) return static_cast<int>(q);
        throw Error("no angle theta_{" + std::to_string(i) + "," + std::to_string(j) + "}");
    }
    int count() const { return static_cast<int>(pairs.size()); }
};

namespace detail {

// right-hand sides Dx theta_ij at one x, given the angles and ubar there
inline std::vector<double> theta_rhs(const AngleField& shape, const std::vector<double>& th,
                                     const std::vector<double>& ubar, double xloc) {
    const int n = shape.n;
    auto T = [&](int i, int j) { return th[shape.index(i, j)]; };
    auto C = [&](int i, int j) {
        double c = std::cos(T(i, j));
        if (std::abs(c) < kGimbalTol) throw GimbalLock(i, j, xloc);
        return c;
    };
    // a_i from the inverted curvature list: a_i = ubar_i prod cos(i+1,j)/cos(i,j)
    std::vector<double> a(n, 0.0);  // a[1] = 0
    for (int i = 2; i < n; ++i) {
        double prod = 1.0;
        for (int j = i + 2; j <= n; ++j) prod *= C(i + 1, j) / C(i, j);
        a[i] = ubar[i - 1] * prod;
    }
    std::vector<double> out(shape.count(), 0.0);
    // adjacent angles: Dx theta_{i,i+1} = a_i - sin theta_{i-1,i+1} a_{i-1}
    for (int i = 2; i < n; ++i) {
        double v = a[i];
        if (i >= 3) v -= std::sin(T(i - 1, i + 1)) * a[i - 1];
        out[shape.index(i, i + 1)] = v;
    }
    // constraint angles, j >= i+2
    for (int j = 4; j <= n; ++j)
        for (int i = 2; i <= j - 2; ++i) {
            double p1 = a[i];
            for (int l = i + 2; l <= j; ++l) p1 *= C(i, l) / C(i + 1, l);
            p1 *= std::sin(T(i + 1, j));
            double v = p1;
            if (i >= 3) {
                double p2 = a[i - 1];
                for (int l = i + 1; l <= j - 1; ++l) p2 *= C(i - 1, l) / C(i, l);
                p2 *= std::sin(T(i - 1, j));
                v -= p2;
            }
            out[shape.index(i, j)] = v;
        }
    return out;
}

}  // namespace detail

// Integrates the angle ODE system with fixed-step RK4 (8 substeps per grid
// interval, midpoint samples taken from 16x trigonometric upsampling) and
// applies the Euler transformation to produce the natural curvatures.
inline std::pair<VectorField, AngleField> natural_from_frenet(
    int n, const VectorField& ubar, const std::vector<double>& theta0 = {}) {
    const int m = n - 1;
    const int N = ubar[0].N();
    const double L = ubar[0].L;
    for (double y : ubar[0].v)
        if (y <= 0) throw PositivityLoss();
    AngleField th(n, N, L);
    std::vector<double> state(th.count(), 0.0);
    if (!theta0.empty()) state = theta0;

    constexpr int kSub = 8, kUp = 2 * kSub;
    std::vector<std::vector<double>> up(m);  // 16x upsampled components
    for (int c = 0; c < m; ++c) up[c] = upsample(ubar[c], kUp).v;
    const int Nf = N * kUp;
    const double hx = L / (N * kSub);

    auto sample = [&](int fine) {
        std::vector<double> ub(m);
        for (int c = 0; c < m; ++c) ub[c] = up[c][fine % Nf];
        return ub;
    };
    auto add = [&](const std::vector<double>& a, double s, const std::vector<double>& b) {
        std::vector<double> r = a;
        for (size_t q = 0; q < r.size(); ++q) r[q] += s * b[q];
        return r;
    };

    for (int g = 0; g < N; ++g) {
        for (int q = 0; q < th.count(); ++q) th.theta[q].v[g] = state[q];
        for (int s = 0; s < kSub; ++s) {
            int fine = 2 * (g * kSub + s);
            double xloc = fine * L / Nf;
            auto ua = sample(fine), um = sample(fine + 1), ub = sample(fine + 2);
            auto k1 = detail::theta_rhs(th, state, ua, xloc);
            auto k2 = detail::theta_rhs(th, add(state, hx / 2, k1), um, xloc);
            auto k3 = detail::theta_rhs(th, add(state, hx / 2, k2), um, xloc);
            auto k4 = detail::theta_rhs(th, add(state, hx, k3), ub, xloc);
            for (int q = 0; q < th.count(); ++q)
                state[q] += hx / 6 * (k1[q] + 2 * k2[q] + 2 * k3[q] + k4[q]);
        }
    }

    // Euler transformation: u^(1) = ubar^(1) cos th_23 ... cos th_2n,
    // u^(k) = ubar^(1) sin th_{2,k+1} prod_{j=k+2..n} cos th_2j
    VectorField u(m, GridFunction(N, L));
    for (int g = 0; g < N; ++g) {
        auto c2 = [&](int j) { return std::cos(th.theta[th.index(2, j)].v[g]); };
        auto s2 = [&](int j) { return std::sin(th.theta[th.index(2, j)].v[g]); };
        for (int kk = 1; kk <= m; ++kk) {
            double val = ubar[0].v[g];
            if (kk > 1) val *= s2(kk + 1);
            for (int j = (kk == 1 ? 3 : kk + 2); j <= n; ++j) val *= c2(j);
            u[kk - 1].v[g] = val;
        }
    }
    return {std::move(u), std::move(th)};
}

// R = R_{n-1,n} ... R_{34} R_{2n} ... R_{23}: tiers with smaller i applied
// first; R_ij rotates rows i and j (1-based) by theta_ij.
inline MatSeries rotation_field(const AngleField& th) {
    const int n = th.n;
    const int Ng = th.theta.empty() ? 0 : th.theta[0].N();
    MatSeries R = identity_series(Ng, n);
    for (int i = 2; i < n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            const GridFunction& t = th.theta[th.index(i, j)];
            for (int g = 0; g < Ng; ++g) {
                double c = std::cos(t.v[g]), s = std::sin(t.v[g]);
                auto& M = R[g];
                for (int col = 0; col < n; ++col) {
                    double ri = M[(i - 1) * n + col], rj = M[(j - 1) * n + col];
                    M[(i - 1) * n + col] = c * ri + s * rj;
                    M[(j - 1) * n + col] = -s * ri + c * rj;
                }
            }
        }
    return R;
}

// B^(i) factor: the product of R_ij over j for one fixed tier i
inline MatSeries tier_factor(const AngleField& th, int tier) {
    const int n = th.n;
    const int Ng = th.theta[0].N();
    MatSeries B = identity_series(Ng, n);
    for (int j = tier + 1; j <= n; ++j) {
        const GridFunction& t = th.theta[th.index(tier, j)];
        for (int g = 0; g < Ng; ++g) {
            double c = std::cos(t.v[g]), s = std::sin(t.v[g]);
            auto& M = B[g];
            for (int col = 0; col < n; ++col) {
                double ri = M[(tier - 1) * n + col], rj = M[(j - 1) * n + col];
                M[(tier - 1) * n + col] = c * ri + s * rj;
                M[(j - 1) * n + col] = -s * ri + c * rj;
            }
        }
    }
    return B;
}

// 6th-order interior central differences (the angle fields and hence R are
// generally non-periodic, so spectral differentiation does not apply); the
// residual is evaluated on interior points only.
inline double gauge_residual(const VectorField& ubar, const VectorField& u,
                             const AngleField& th) {
    const int n = th.n;
    const int Ng = u[0].N();
    const double h = u[0].dx();
    MatSeries R = rotation_field(th);
    static constexpr std::array<double, 7> c6{-1.0 / 60, 9.0 / 60,  -45.0 / 60, 0.0,
                                             45.0 / 60, -9.0 / 60, 1.0 / 60};
    double worst = 0.0;
    for (int g = 3; g < Ng - 3; ++g) {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                double dR = 0.0;
                for (int s = -3; s <= 3; ++s) dR += c6[s + 3] * R[g + s][r * n + c];
                dR /= h;
                double wFR = 0.0;  // (omega_F R)_{rc}, omega_F tridiagonal skew
                if (r + 1 < n) wFR += ubar[r].v[g] * R[g][(r + 1) * n + c];
                if (r - 1 >= 0) wFR -= ubar[r - 1].v[g] * R[g][(r - 1) * n + c];
                double RwN = 0.0;  // (R omega_N)_{rc}, omega_N first row u
                if (c == 0)
                    for (int l = 1; l < n; ++l) RwN -= R[g][r * n + l] * u[l - 1].v[g];
                else
                    RwN += R[g][r * n + 0] * u[c - 1].v[g];
                worst = std::max(worst, std::abs(wFR - dR - RwN));
            }
    }
    return worst;
}

// Inverse transformation: ubar^(1) = |u|, first-tier angles from spherical
// coordinates, higher tiers solved algebraically tier by tier from the
// constraint equations, Frenet curvatures from the curvature list.
inline std::pair<AngleField, VectorField> angles_from_natural(int n, const VectorField& u) {
    const int m = n - 1;
    const int N = u[0].N();
    const double L = u[0].L;
    AngleField th(n, N, L);

    GridFunction ub1(N, L);
    for (int g = 0; g < N; ++g) {
        double s = 0;
        for (int c = 0; c < m; ++c) s += u[c].v[g] * u[c].v[g];
        ub1.v[g] = std::sqrt(s);
        if (ub1.v[g] < kGimbalTol) throw PositivityLoss();
    }

    // theta_23 = unwrapped atan2(u2, u1)
    GridFunction th23(N, L);
    {
        double prev = std::atan2(u[1].v[0], u[0].v[0]);
        th23.v[0] = prev;
        for (int g = 1; g < N; ++g) {
            double raw = std::atan2(u[1].v[g], u[0].v[g]);
            double d = raw - prev;
            d -= 2 * std::numbers::pi * std::round(d / (2 * std::numbers::pi));
            if (std::abs(d) > std::numbers::pi / 2) throw BranchJump();
            prev += d;
            th23.v[g] = prev;
        }
    }
    th.theta[th.index(2, 3)] = th23;
    // remaining first-tier angles: theta_2j = atan2(u^(j-1), rho_j)
    for (int j = 4; j <= n; ++j) {
        GridFunction t(N, L);
        for (int g = 0; g < N; ++g) {
            double rho2 = 0;
            for (int c = 0; c <= j - 3; ++c) rho2 += u[c].v[g] * u[c].v[g];
            t.v[g] = std::atan2(u[j - 2].v[g], std::sqrt(rho2));
        }
        th.theta[th.index(2, j)] = t;
    }

    // x-derivatives of the first-tier angles; theta_23 may wind, so its
    // integer winding trend is removed before spectral differentiation
    std::vector<GridFunction> dth(th.count(), GridFunction(N, L));
    {
        double span = 2 * th23.v[N - 1] - th23.v[N - 2] - th23.v[0];
        double w = std::round(span / (2 * std::numbers::pi));
        double trend = 2 * std::numbers::pi * w / L;
        GridFunction detr = th23;
        for (int g = 0; g < N; ++g) detr.v[g] -= trend * detr.x(g);
        GridFunction d = spectral_derivative(detr);
        for (int g = 0; g < N; ++g) d.v[g] += trend;
        dth[th.index(2, 3)] = d;
    }
    for (int j = 4; j <= n; ++j)
        dth[th.index(2, j)] = spectral_derivative(th.theta[th.index(2, j)]);

    std::vector<GridFunction> a(n, GridFunction(N, L));  // a[1] = 0
    if (n >= 3) a[2] = dth[th.index(2, 3)];

    // tier recursion: from known tier i and a_i, solve for tier i+1 angles
    for (int i = 2; i <= n - 2; ++i) {
        for (int j = i + 2; j <= n; ++j) {
            GridFunction t(N, L);
            for (int g = 0; g < N; ++g) {
                double K = dth[th.index(i, j)].v[g];
                if (i >= 3) {
                    double p2 = a[i - 1].v[g];
                    for (int l = i + 1; l <= j - 1; ++l)
                        p2 *= std::cos(th.theta[th.index(i - 1, l)].v[g]) /
                              std::cos(th.theta[th.index(i, l)].v[g]);
                    p2 *= std::sin(th.theta[th.index(i - 1, j)].v[g]);
                    K += p2;
                }
                double num = K;
                for (int l = i + 2; l <= j - 1; ++l)
                    num *= std::cos(th.theta[th.index(i + 1, l)].v[g]);
                double den = a[i].v[g];
                for (int l = i + 2; l <= j; ++l)
                    den *= std::cos(th.theta[th.index(i, l)].v[g]);
                t.v[g] = std::atan(num / den);
                if (std::abs(std::cos(t.v[g])) < kGimbalTol)
                    throw GimbalLock(i + 1, j, t.x(g));
            }
            th.theta[th.index(i + 1, j)] = t;
            dth[th.index(i + 1, j)] = spectral_derivative(t);
        }
        for (int g = 0; g < N; ++g)
            a[i + 1].v[g] = dth[th.index(i + 1, i + 2)].v[g] +
                            std::sin(th.theta[th.index(i, i + 2)].v[g]) * a[i].v[g];
    }

    // Frenet curvatures: ubar^(i) = prod_{j=i+2..n} (cos th_ij / cos th_{i+1,j}) a_i
    VectorField ubar(m, GridFunction(N, L));
    ubar[0] = ub1;
    for (int i = 2; i < n; ++i)
        for (int g = 0; g < N; ++g) {
            double prod = 1.0;
            for (int j = i + 2; j <= n; ++j)
                prod *= std::cos(th.theta[th.index(i, j)].v[g]) /
                        std::cos(th.theta[th.index(i + 1, j)].v[g]);
            ubar[i - 1].v[g] = prod * a[i].v[g];
        }
    return {std::move(th), std::move(ubar)};
}

// classical n=3 Hasimoto: phi = kappa exp(i int tau dx), antiderivative
// anchored at x=0; returned as (Re, Im)
inline std::pair<GridFunction, GridFunction> hasimoto_n3(const GridFunction& kappa,
                                                         const GridFunction& tau) {
    GridFunction S = line_antiderivative(tau);
    GridFunction re = kappa, im = kappa;
    for (int g = 0; g < kappa.N(); ++g) {
        re.v[g] = kappa.v[g] * std::cos(S.v[g]);
        im.v[g] = kappa.v[g] * std::sin(S.v[g]);
    }
    return {std::move(re), std::move(im)};
}

}  // namespace vmkdv
