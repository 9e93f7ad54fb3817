#pragma once

// Pseudospectral evolution of the curvature vector under
//   u_t = u_xxx + 3/2 <u,u> u_x - kappa_c u_x
// (integrating-factor RK4, 2/3-rule dealiasing), reconstruction of the curve
// and natural frame in flat space, co-evolution of (gamma, frame), and the
// conserved-density report.

#include <cmath>
#include <complex>
#include <vector>

#include "vmkdv/grid.hpp"

namespace vmkdv {

struct FlowTrajectory {
    double dt = 0;
    double kappa_c = 0;
    std::vector<double> times;
    std::vector<VectorField> snapshots;
    std::vector<double> energy;       // int <u,u> dx per snapshot
    std::vector<double> energy2;      // int (<u1,u1> - 1/4 <u,u>^2) dx
};

inline double quadratic_energy(const VectorField& u) {
    return integral(inner(u, u));
}

inline double cubicish_energy(const VectorField& u) {
    VectorField u1;
    for (auto& c : u) u1.push_back(spectral_derivative(c));
    GridFunction uu = inner(u, u);
    GridFunction dens = inner(u1, u1);
    for (int g = 0; g < dens.N(); ++g) dens.v[g] -= 0.25 * uu.v[g] * uu.v[g];
    return integral(dens);
}

// Advective CFL guard: the integrating factor removes the stiff dispersive
// constraint, so only the nonlinear transport term limits dt.
inline void check_stability(const VectorField& u0, double dt, double kappa_c,
                            double nonlinear_sign) {
    GridFunction uu = inner(u0, u0);
    double speed = 1.0;
    for (double y : uu.v)
        speed = std::max(speed, std::abs(nonlinear_sign * y - kappa_c) + 1.0);
    if (dt > u0[0].dx() / speed) throw StabilityViolation();
}

inline FlowTrajectory evolve_vmkdv(const VectorField& u0, double T, double dt,
                                   double kappa_c = 0.0, int record_every = 0,
                                   double nonlinear_sign = 1.5) {
    const int m = static_cast<int>(u0.size());
    const int N = u0[0].N();
    const double L = u0[0].L;
    check_stability(u0, dt, kappa_c, nonlinear_sign);
    const double blowup = 1e3 * std::max(norm_inf(u0), 1.0);
    const int steps = static_cast<int>(std::lround(T / dt));

    std::vector<bool> keep(N);
    for (int q = 0; q < N; ++q) {
        int kk = (q <= N / 2) ? q : q - N;
        keep[q] = std::abs(kk) <= N / 3;
    }
    std::vector<Cplx> E(N), E2(N);
    for (int q = 0; q < N; ++q) {
        Cplx ik(0.0, wavenumber(q, N, L));
        Cplx sym = ik * ik * ik - kappa_c * ik;
        E[q] = std::exp(sym * (dt / 2));
        E2[q] = E[q] * E[q];
    }

    std::vector<std::vector<Cplx>> uh(m);
    for (int c = 0; c < m; ++c) uh[c] = to_spectral(u0[c]);

    auto to_fields = [&](const std::vector<std::vector<Cplx>>& spec) {
        VectorField f;
        for (int c = 0; c < m; ++c) f.push_back(from_spectral(spec[c], L));
        return f;
    };
    // dealiased nonlinear term sign*<u,u>*u_x in spectral space
    auto NL = [&](const std::vector<std::vector<Cplx>>& spec) {
        std::vector<GridFunction> u(m), ux(m);
        for (int c = 0; c < m; ++c) {
            std::vector<Cplx> a = spec[c], b = spec[c];
            for (int q = 0; q < N; ++q) {
                if (!keep[q]) a[q] = b[q] = 0;
                b[q] *= Cplx(0.0, wavenumber(q, N, L));
            }
            u[c] = from_spectral(std::move(a), L);
            ux[c] = from_spectral(std::move(b), L);
        }
        GridFunction uu = inner(u, u);
        std::vector<std::vector<Cplx>> out(m);
        for (int c = 0; c < m; ++c) {
            GridFunction f(N, L);
            for (int g = 0; g < N; ++g) f.v[g] = nonlinear_sign * uu.v[g] * ux[c].v[g];
            out[c] = to_spectral(f);
            for (int q = 0; q < N; ++q)
                if (!keep[q]) out[c][q] = 0;
        }
        return out;
    };
    auto lin = [&](const std::vector<std::vector<Cplx>>& s, const std::vector<Cplx>& fac) {
        auto r = s;
        for (int c = 0; c < m; ++c)
            for (int q = 0; q < N; ++q) r[c][q] *= fac[q];
        return r;
    };
    auto axpy = [&](const std::vector<std::vector<Cplx>>& s, double sc,
                    const std::vector<std::vector<Cplx>>& t) {
        auto r = s;
        for (int c = 0; c < m; ++c)
            for (int q = 0; q < N; ++q) r[c][q] += sc * t[c][q];
        return r;
    };

    FlowTrajectory traj;
    traj.dt = dt;
    traj.kappa_c = kappa_c;
    auto record = [&](int step) {
        VectorField u = to_fields(uh);
        traj.times.push_back(step * dt);
        traj.energy.push_back(quadratic_energy(u));
        traj.energy2.push_back(cubicish_energy(u));
        traj.snapshots.push_back(std::move(u));
    };
    record(0);
    for (int s = 0; s < steps; ++s) {
        auto a = NL(uh);
        auto b = NL(lin(axpy(uh, 0.5 * dt, a), E));
        auto c = NL(axpy(lin(uh, E), 0.5 * dt, b));
        auto d = NL(axpy(lin(uh, E2), dt, lin(c, E)));
        // uh <- E2 uh + dt/6 (E2 a + 2 E (b + c) + d)
        auto next = lin(uh, E2);
        auto ea = lin(a, E2);
        auto ebc = lin(axpy(b, 1.0, c), E);
        for (int cc = 0; cc < m; ++cc)
            for (int q = 0; q < N; ++q)
                next[cc][q] += dt / 6.0 * (ea[cc][q] + 2.0 * ebc[cc][q] + d[cc][q]);
        uh = std::move(next);
        if ((s + 1) % 16 == 0 || s + 1 == steps)
            if (norm_inf(to_fields(uh)) > blowup) throw BlowUp();
        if ((record_every > 0 && (s + 1) % record_every == 0) || s + 1 == steps)
            if (traj.times.back() != (s + 1) * dt) record(s + 1);
    }
    return traj;
}

// ---- frame reconstruction and curve evolution ----

struct FrameState {
    int n = 3;
    VectorField gamma;  // n coordinate functions of the curve
    MatSeries e;        // frame matrices, row i = e_{i+1}
    VectorField u;      // curvatures the frame was built from
};

namespace detail {

inline void newton_schulz(std::vector<double>& M, int n, int iters = 3) {
    std::vector<double> G(n * n), T(n * n);
    for (int it = 0; it < iters; ++it) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0;
                for (int k = 0; k < n; ++k) s += M[i * n + k] * M[j * n + k];
                G[i * n + j] = s;  // M M^T
            }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0;
                for (int k = 0; k < n; ++k) s += G[i * n + k] * M[k * n + j];
                T[i * n + j] = 1.5 * M[i * n + j] - 0.5 * s;
            }
        M = T;
    }
}

// omega_nat(value) * E for the natural Cartan matrix with first row uv
inline std::vector<double> omega_mul(const std::vector<double>& uv, const std::vector<double>& E,
                                     int n) {
    std::vector<double> R(n * n, 0.0);
    const int m = n - 1;
    for (int c = 0; c < n; ++c) {
        double s = 0;
        for (int i = 0; i < m; ++i) s += uv[i] * E[(i + 1) * n + c];
        R[0 * n + c] = s;
        for (int i = 0; i < m; ++i) R[(i + 1) * n + c] = -uv[i] * E[0 * n + c];
    }
    return R;
}

}  // namespace detail

// integrates e_x = omega_nat e, gamma_x = e_1 with RK4 (8 substeps per grid
// interval on upsampled curvature data) and per-substep re-orthonormalization
inline FrameState reconstruct_frame(const VectorField& u,
                                    const std::vector<double>& gamma0 = {},
                                    const std::vector<double>& e0 = {}) {
    const int m = static_cast<int>(u.size());
    const int n = m + 1;
    const int N = u[0].N();
    const double L = u[0].L;
    constexpr int kSub = 8;
    std::vector<std::vector<double>> up(m);
    for (int c = 0; c < m; ++c) up[c] = upsample(u[c], kSub).v;
    const int Nf = N * kSub;
    const double hx = L / Nf;

    FrameState st;
    st.n = n;
    st.u = u;
    st.gamma.assign(n, GridFunction(N, L));
    st.e = identity_series(N, n);
    std::vector<double> E(n * n, 0.0), g(n, 0.0);
    for (int i = 0; i < n; ++i) E[i * n + i] = 1.0;
    if (!e0.empty()) E = e0;
    if (!gamma0.empty()) g = gamma0;

    auto sample = [&](int j) {
        std::vector<double> uv(m);
        for (int c = 0; c < m; ++c) uv[c] = up[c][j % Nf];
        return uv;
    };
    auto addm = [&](const std::vector<double>& A, double s, const std::vector<double>& B) {
        std::vector<double> R = A;
        for (size_t q = 0; q < R.size(); ++q) R[q] += s * B[q];
        return R;
    };

    for (int idx = 0; idx < N; ++idx) {
        st.e[idx] = E;
        for (int i = 0; i < n; ++i) st.gamma[i].v[idx] = g[i];
        for (int s = 0; s < kSub; ++s) {
            int j = idx * kSub + s;
            auto ua = sample(j), ub = sample(j + 1);
            std::vector<double> um(m);
            for (int c = 0; c < m; ++c) um[c] = 0.5 * (ua[c] + ub[c]);
            auto k1 = detail::omega_mul(ua, E, n);
            auto e2 = addm(E, hx / 2, k1);
            auto k2 = detail::omega_mul(um, e2, n);
            auto e3 = addm(E, hx / 2, k2);
            auto k3 = detail::omega_mul(um, e3, n);
            auto e4 = addm(E, hx, k3);
            auto k4 = detail::omega_mul(ub, e4, n);
            for (int i = 0; i < n; ++i)
                g[i] += hx / 6 *
                        (E[0 * n + i] + 2 * e2[0 * n + i] + 2 * e3[0 * n + i] + e4[0 * n + i]);
            for (int q = 0; q < n * n; ++q)
                E[q] += hx / 6 * (k1[q] + 2 * k2[q] + 2 * k3[q] + k4[q]);
            detail::newton_schulz(E, n);
        }
    }
    return st;
}

namespace detail {

// time derivative of (gamma, e) under the vmKdV-compatible frame motion:
// Dt gamma = h1 e1 + sum u1_i e_{i+1},  Dt e = Omega e with
// Omega_{1,i+1} = (I u1)_i = u2_i + 1/2<u,u> u_i,  h1 = 1/2<u,u>,
// Omega_{i+1,j+1} = -(u_i u1_j - u_j u1_i)   (all exact local antiderivatives)
inline void frame_rhs(const VectorField& u, const MatSeries& e, const VectorField& gamma,
                      MatSeries& de, VectorField& dgamma) {
    const int m = static_cast<int>(u.size());
    const int n = m + 1;
    const int N = u[0].N();
    std::vector<GridFunction> u1(m), u2(m);
    for (int c = 0; c < m; ++c) {
        u1[c] = spectral_derivative(u[c]);
        u2[c] = spectral_derivative(u1[c]);
    }
    GridFunction uu = inner(u, u);
    for (int g = 0; g < N; ++g) {
        double h1 = 0.5 * uu.v[g];
        std::vector<double> Om(n * n, 0.0);
        for (int i = 0; i < m; ++i) {
            double Ih = u2[i].v[g] + h1 * u[i].v[g];
            Om[0 * n + (i + 1)] = Ih;
            Om[(i + 1) * n + 0] = -Ih;
        }
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                double val = -(u[i].v[g] * u1[j].v[g] - u[j].v[g] * u1[i].v[g]);
                Om[(i + 1) * n + (j + 1)] = val;
                Om[(j + 1) * n + (i + 1)] = -val;
            }
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                double s = 0;
                for (int k = 0; k < n; ++k) s += Om[r * n + k] * e[g][k * n + c];
                de[g][r * n + c] = s;
            }
        for (int i = 0; i < n; ++i) {
            double s = h1 * e[g][0 * n + i];
            for (int c = 0; c < m; ++c) s += u1[c].v[g] * e[g][(c + 1) * n + i];
            dgamma[i].v[g] = s;
        }
    }
    (void)gamma;
}

}  // namespace detail

// interior 6th-order derivative of an open (non-periodic) sampled field;
// first and last three points are left untouched by the caller's reductions
inline std::vector<double> fd6_interior(const std::vector<double>& f, double h) {
    static constexpr double c6[7] = {-1.0 / 60, 9.0 / 60,  -45.0 / 60, 0.0,
                                     45.0 / 60, -9.0 / 60, 1.0 / 60};
    std::vector<double> out(f.size(), 0.0);
    for (size_t i = 3; i + 3 < f.size(); ++i) {
        double s = 0;
        for (int q = -3; q <= 3; ++q) s += c6[q + 3] * f[i + q];
        out[i] = s / h;
    }
    return out;
}

// max | |gamma_x| - 1 | over interior points
inline double arc_length_defect(const FrameState& st) {
    const int N = st.gamma[0].N();
    const double h = st.gamma[0].dx();
    std::vector<std::vector<double>> gx;
    for (auto& comp : st.gamma) gx.push_back(fd6_interior(comp.v, h));
    double worst = 0;
    for (int g = 3; g < N - 3; ++g) {
        double s = 0;
        for (auto& c : gx) s += c[g] * c[g];
        worst = std::max(worst, std::abs(std::sqrt(s) - 1.0));
    }
    return worst;
}

// curvatures recomputed from the frame: u_i = <Dx e_1, e_{i+1}>
inline double curvature_consistency(const FrameState& st, const VectorField& u_ref) {
    const int n = st.n, N = st.gamma[0].N();
    const double h = st.gamma[0].dx();
    std::vector<std::vector<double>> e1x(n);
    for (int c = 0; c < n; ++c) {
        std::vector<double> col(N);
        for (int g = 0; g < N; ++g) col[g] = st.e[g][0 * n + c];
        e1x[c] = fd6_interior(col, h);
    }
    double worst = 0;
    for (int i = 0; i < n - 1; ++i)
        for (int g = 3; g < N - 3; ++g) {
            double s = 0;
            for (int c = 0; c < n; ++c) s += e1x[c][g] * st.e[g][(i + 1) * n + c];
            worst = std::max(worst, std::abs(s - u_ref[i].v[g]));
        }
    return worst;
}

// co-evolves (u, gamma, frame): u by integrating-factor RK4, the frame by RK4
// with u sampled at t, t+dt/2, t+dt, Newton-Schulz re-orthonormalization per
// step. Throws ConsistencyDrift if the curvatures recomputed from the evolved
// frame leave the tolerance.
inline FrameState evolve_curve(const VectorField& u0, double T, double dt,
                               double consistency_tol = 1e-4) {
    const int m = static_cast<int>(u0.size());
    const int n = m + 1;
    const int N = u0[0].N();
    FrameState st = reconstruct_frame(u0);
    VectorField u = u0;
    const int steps = static_cast<int>(std::lround(T / dt));

    MatSeries k1e(N, std::vector<double>(n * n)), k2e = k1e, k3e = k1e, k4e = k1e;
    VectorField k1g(n, GridFunction(N, u0[0].L));
    VectorField k2g = k1g, k3g = k1g, k4g = k1g;

    auto addm = [&](const MatSeries& A, double s, const MatSeries& B) {
        MatSeries R = A;
        for (int g = 0; g < N; ++g)
            for (size_t q = 0; q < R[g].size(); ++q) R[g][q] += s * B[g][q];
        return R;
    };
    auto addf = [&](const VectorField& A, double s, const VectorField& B) {
        VectorField R = A;
        for (size_t c = 0; c < R.size(); ++c)
            for (int g = 0; g < N; ++g) R[c].v[g] += s * B[c].v[g];
        return R;
    };

    for (int s = 0; s < steps; ++s) {
        VectorField u_half = evolve_vmkdv(u, dt / 2, dt / 2).snapshots.back();
        VectorField u_full = evolve_vmkdv(u, dt, dt / 2).snapshots.back();
        detail::frame_rhs(u, st.e, st.gamma, k1e, k1g);
        detail::frame_rhs(u_half, addm(st.e, dt / 2, k1e), addf(st.gamma, dt / 2, k1g), k2e, k2g);
        detail::frame_rhs(u_half, addm(st.e, dt / 2, k2e), addf(st.gamma, dt / 2, k2g), k3e, k3g);
        detail::frame_rhs(u_full, addm(st.e, dt, k3e), addf(st.gamma, dt, k3g), k4e, k4g);
        for (int g = 0; g < N; ++g)
            for (int q = 0; q < n * n; ++q)
                st.e[g][q] += dt / 6 * (k1e[g][q] + 2 * k2e[g][q] + 2 * k3e[g][q] + k4e[g][q]);
        for (int c = 0; c < n; ++c)
            for (int g = 0; g < N; ++g)
                st.gamma[c].v[g] +=
                    dt / 6 * (k1g[c].v[g] + 2 * k2g[c].v[g] + 2 * k3g[c].v[g] + k4g[c].v[g]);
        for (int g = 0; g < N; ++g) detail::newton_schulz(st.e[g], n);
        u = std::move(u_full);
    }
    st.u = u;
    double drift = curvature_consistency(st, u);
    if (drift > consistency_tol) throw ConsistencyDrift(drift);
    return st;
}

// conserved densities per snapshot with relative drift against t=0
struct ConservedRow {
    double t, e1, e2, drift1, drift2;
};

inline std::vector<ConservedRow> conserved_report(const FlowTrajectory& traj) {
    std::vector<ConservedRow> rows;
    for (size_t s = 0; s < traj.times.size(); ++s) {
        double r1 = traj.energy[0] != 0 ? (traj.energy[s] - traj.energy[0]) / traj.energy[0] : 0.0;
        double r2 =
            traj.energy2[0] != 0 ? (traj.energy2[s] - traj.energy2[0]) / traj.energy2[0] : 0.0;
        rows.push_back({traj.times[s], traj.energy[s], traj.energy2[s], r1, r2});
    }
    return rows;
}

}  // namespace vmkdv
