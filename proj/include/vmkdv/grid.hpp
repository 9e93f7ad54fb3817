#pragma once

// Periodic uniform grids with spectral differentiation / antidifferentiation.
// N is restricted to powers of two (radix-2 FFT), N >= 16.

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "vmkdv/errors.hpp"

namespace vmkdv {

using Cplx = std::complex<double>;

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey; inverse includes the 1/N factor.
inline void fft(std::vector<Cplx>& a, bool inverse) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = 2 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1 : -1);
        Cplx wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            Cplx w(1.0);
            for (size_t k = 0; k < len / 2; ++k) {
                Cplx x = a[i + k], y = a[i + k + len / 2] * w;
                a[i + k] = x + y;
                a[i + k + len / 2] = x - y;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& z : a) z /= static_cast<double>(n);
}

struct GridFunction {
    double L = 2 * std::numbers::pi;   // period length
    std::vector<double> v;             // N samples, x_m = m L / N

    GridFunction() = default;
    GridFunction(int N, double length, double fill = 0.0) : L(length), v(N, fill) {
        if (!is_pow2(N) || N < 16) throw Error("grid size must be a power of two >= 16");
    }

    int N() const { return static_cast<int>(v.size()); }
    double dx() const { return L / N(); }
    double x(int m) const { return m * dx(); }
    double& operator[](int m) { return v[m]; }
    double operator[](int m) const { return v[m]; }
};

inline std::vector<double> grid_nodes(int N, double L) {
    std::vector<double> x(N);
    for (int m = 0; m < N; ++m) x[m] = m * L / N;
    return x;
}

inline double mean(const GridFunction& f) {
    double s = 0;
    for (double y : f.v) s += y;
    return s / f.N();
}

inline double integral(const GridFunction& f) { return mean(f) * f.L; }

inline double norm_inf(const GridFunction& f) {
    double m = 0;
    for (double y : f.v) m = std::max(m, std::abs(y));
    return m;
}

inline double norm_l2(const GridFunction& f) {
    double s = 0;
    for (double y : f.v) s += y * y;
    return std::sqrt(s * f.dx());
}

// wavenumber of spectral bin m for period L (standard FFT ordering)
inline double wavenumber(int m, int N, double L) {
    int kk = (m <= N / 2) ? m : m - N;
    return 2 * std::numbers::pi * kk / L;
}

inline std::vector<Cplx> to_spectral(const GridFunction& f) {
    std::vector<Cplx> a(f.v.begin(), f.v.end());
    fft(a, false);
    return a;
}

inline GridFunction from_spectral(std::vector<Cplx> a, double L) {
    fft(a, true);
    GridFunction f(static_cast<int>(a.size()), L);
    for (size_t m = 0; m < a.size(); ++m) f.v[m] = a[m].real();
    return f;
}

// d^order/dx^order by Fourier multiplier; Nyquist mode zeroed for odd orders.
inline GridFunction spectral_derivative(const GridFunction& f, int order = 1) {
    if (order == 0) return f;
    auto a = to_spectral(f);
    const int N = f.N();
    for (int m = 0; m < N; ++m) {
        if (m == N / 2 && order % 2 == 1) {
            a[m] = 0;
            continue;
        }
        Cplx ik(0.0, wavenumber(m, N, f.L));
        a[m] *= std::pow(ik, order);
    }
    return from_spectral(std::move(a), f.L);
}

// Zero-mean antiderivative on the circle: the mean of the input is discarded
// (projected away) and the output mean is fixed to zero.
inline GridFunction spectral_antiderivative(const GridFunction& f) {
    auto a = to_spectral(f);
    const int N = f.N();
    a[0] = 0;
    for (int m = 1; m < N; ++m) {
        if (m == N / 2) {
            a[m] = 0;
            continue;
        }
        a[m] /= Cplx(0.0, wavenumber(m, N, f.L));
    }
    return from_spectral(std::move(a), f.L);
}

// Antiderivative on a line segment: F(x) = mean * x + (zero-mean spectral
// part), anchored so F(0) = 0. Used where Dx^{-1} Dx = id must hold exactly.
inline GridFunction line_antiderivative(const GridFunction& f) {
    double mu = mean(f);
    GridFunction F = spectral_antiderivative(f);
    double F0 = F.v[0];
    for (int m = 0; m < f.N(); ++m) F.v[m] += mu * f.x(m) - F0;
    return F;
}

// 2/3-rule dealiasing: zero all modes with |k index| > N/3.
inline GridFunction dealias(const GridFunction& f) {
    auto a = to_spectral(f);
    const int N = f.N();
    for (int m = 0; m < N; ++m) {
        int kk = (m <= N / 2) ? m : m - N;
        if (std::abs(kk) > N / 3) a[m] = 0;
    }
    return from_spectral(std::move(a), f.L);
}

// Trigonometric interpolation onto a grid factor times finer.
inline GridFunction upsample(const GridFunction& f, int factor) {
    const int N = f.N(), Nf = N * factor;
    auto a = to_spectral(f);
    std::vector<Cplx> big(Nf, Cplx(0));
    for (int m = 0; m < N / 2; ++m) big[m] = a[m];
    for (int m = 1; m <= N / 2; ++m) big[Nf - m] = a[N - m];
    GridFunction g = from_spectral(std::move(big), f.L);
    for (auto& y : g.v) y *= factor;
    return g;
}

inline GridFunction pointwise(const GridFunction& a, const GridFunction& b,
                              double (*op)(double, double)) {
    GridFunction r = a;
    for (int m = 0; m < r.N(); ++m) r.v[m] = op(a.v[m], b.v[m]);
    return r;
}

inline GridFunction operator+(GridFunction a, const GridFunction& b) {
    for (int m = 0; m < a.N(); ++m) a.v[m] += b.v[m];
    return a;
}
inline GridFunction operator-(GridFunction a, const GridFunction& b) {
    for (int m = 0; m < a.N(); ++m) a.v[m] -= b.v[m];
    return a;
}
inline GridFunction operator*(GridFunction a, const GridFunction& b) {
    for (int m = 0; m < a.N(); ++m) a.v[m] *= b.v[m];
    return a;
}
inline GridFunction operator*(double c, GridFunction a) {
    for (auto& y : a.v) y *= c;
    return a;
}

// Multi-component field: one GridFunction per component (n-1 of them).
using VectorField = std::vector<GridFunction>;

inline double norm_inf(const VectorField& f) {
    double m = 0;
    for (auto& c : f) m = std::max(m, norm_inf(c));
    return m;
}

inline GridFunction inner(const VectorField& a, const VectorField& b) {
    GridFunction r(a[0].N(), a[0].L);
    for (size_t c = 0; c < a.size(); ++c)
        for (int m = 0; m < r.N(); ++m) r.v[m] += a[c].v[m] * b[c].v[m];
    return r;
}

// dense n x n matrices, one per grid point, row-major
using MatSeries = std::vector<std::vector<double>>;  // [point][r*n + c]

inline MatSeries identity_series(int Ng, int n) {
    MatSeries R(Ng, std::vector<double>(n * n, 0.0));
    for (auto& M : R)
        for (int i = 0; i < n; ++i) M[i * n + i] = 1.0;
    return R;
}

// ---- CSV I/O: header "x,comp1,comp2,...", one row per grid node ----

inline void write_csv(const std::string& path, const VectorField& f) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    os.precision(17);
    os << "x";
    for (size_t c = 0; c < f.size(); ++c) os << ",comp" << (c + 1);
    os << "\n";
    for (int m = 0; m < f[0].N(); ++m) {
        os << f[0].x(m);
        for (auto& comp : f) os << "," << comp.v[m];
        os << "\n";
    }
}

inline VectorField read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw Error("empty CSV " + path);
    int ncols = 1;
    for (char ch : line) ncols += (ch == ',');
    if (ncols < 2) throw Error("CSV needs x plus at least one component column");
    std::vector<std::vector<double>> cols(ncols);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        for (int c = 0; c < ncols; ++c) {
            if (!std::getline(row, cell, ',')) throw Error("short CSV row in " + path);
            cols[c].push_back(std::stod(cell));
        }
    }
    const int N = static_cast<int>(cols[0].size());
    if (!is_pow2(N) || N < 16) throw Error("CSV grid size must be a power of two >= 16");
    // infer period length from uniform spacing of the x column
    double dx = (N > 1) ? cols[0][1] - cols[0][0] : 1.0;
    double L = dx * N;
    VectorField f;
    for (int c = 1; c < ncols; ++c) {
        GridFunction g(N, L);
        g.v = cols[c];
        f.push_back(std::move(g));
    }
    return f;
}

}  // namespace vmkdv
