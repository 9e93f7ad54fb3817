// vmkdv command-line front end.
//
// Subcommands:
//   hierarchy  -- print/write symmetry hierarchy members in expression text
//   verify     -- run a named identity check (symplectic, jacobi, hereditary,
//                 nls-square, lambda, killing) on seeded data
//   hasimoto   -- transform Frenet curvatures <-> natural curvatures (CSV)
//   evolve     -- integrate the vmKdV flow from a CSV initial condition
//   laxcheck   -- zero-curvature residual table along a stored trajectory
//
// Exit codes: 0 pass, 1 failed verdict, 2 symbolic obstruction,
//             3 numerical domain error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vmkdv/curveflow.hpp"
#include "vmkdv/divergence.hpp"
#include "vmkdv/evaluate.hpp"
#include "vmkdv/expr.hpp"
#include "vmkdv/grid.hpp"
#include "vmkdv/hasimoto.hpp"
#include "vmkdv/laxpair.hpp"
#include "vmkdv/operators.hpp"
#include "vmkdv/parser.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace vmkdv;

static constexpr const char* kVersion = "1.0.0";

// ---- atomic file output (temp + rename) ----

static void atomic_write(const fs::path& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw Error("cannot open " + tmp.string() + " for writing");
        os << text;
    }
    fs::rename(tmp, path);
}

static void atomic_write_csv(const fs::path& path, const VectorField& f) {
    fs::path tmp = path;
    tmp += ".tmp";
    write_csv(tmp.string(), f);
    fs::rename(tmp, path);
}

// ---- run manifest ----

struct Manifest {
    std::string command;
    json params = json::object();
    std::vector<std::string> inputs, outputs;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void write(const fs::path& dir) const {
        json m;
        m["command"] = command;
        m["parameters"] = params;
        m["inputs"] = inputs;
        m["outputs"] = outputs;
        m["version"] = kVersion;
        m["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        fs::create_directories(dir);
        atomic_write(dir / "manifest.json", m.dump(2) + "\n");
    }
};

// ---- subcommand implementations ----

static int run_hierarchy(int n, int k, const std::string& out) {
    Manifest man;
    man.command = "hierarchy";
    man.params = {{"n", n}, {"k", k}};
    if (k > 4) {
        std::cerr << "error: k must be <= 4 (symbolic size guard)\n";
        return 2;
    }
    std::vector<VectorExpression> hs;
    try {
        hs = hierarchy(n, k);
    } catch (const NonlocalHierarchyMember& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    const VectorExpression& S = hs.back();
    std::string text;
    for (size_t c = 0; c < S.size(); ++c)
        text += "comp" + std::to_string(c + 1) + ": " + print(S[c]) + "\n";
    text += "local: yes\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        fs::path dir = fs::path(out);
        fs::create_directories(dir);
        fs::path file = dir / ("hierarchy_n" + std::to_string(n) + "_k" + std::to_string(k) + ".txt");
        atomic_write(file, text);
        man.outputs.push_back(file.string());
        man.write(dir);
    }
    return 0;
}

static int run_verify(const std::string& check, int n, int N, std::uint64_t seed,
                      const std::string& out) {
    Manifest man;
    man.command = "verify " + check;
    man.params = {{"check", check}, {"n", n}, {"N", N}, {"seed", seed}};
    json verdict;
    verdict["check"] = check;
    verdict["n"] = n;
    bool pass = false;
    std::mt19937_64 rng(seed);
    const double L = 2 * std::numbers::pi;

    if (check == "symplectic") {
        bool sym = check_symplectic(n) == Equiv::True;
        double res = symplectic_grid_residual(n, N, seed);
        pass = sym && res < 1e-8;
        verdict["symbolic"] = sym;
        verdict["grid_residual"] = res;
        verdict["tolerance"] = 1e-8;
    } else if (check == "jacobi") {
        VectorExpression u = fam_vec(Family::u, n), u1 = fam_vec(Family::u, n, 1);
        std::vector<Expression> dens = {
            Rat(1) / 2 * inner_expr(u, u), Rat(1) / 2 * inner_expr(u1, u1),
            Rat(1) / 4 * inner_expr(u, u) * inner_expr(u, u)};
        VectorField u0 = random_field(n - 1, N, L, rng, 0.8);
        WeaklyNonlocalOperator H = cosymplectic_H(n);
        auto [res, scale] = check_jacobi_numeric(
            dens, u0, n,
            [&](const VectorField& ub, const VectorField& g) {
                return apply_numeric(H, ub, g, DxiMode::periodic);
            });
        pass = res < 1e-6 * scale;
        verdict["residual"] = res;
        verdict["scale"] = scale;
        verdict["tolerance_rel"] = 1e-6;
    } else if (check == "hereditary") {
        VectorField u = random_field(n - 1, N, L, rng, 1.0, 6, true);
        VectorField P = random_field(n - 1, N, L, rng, 1.0, 6, true);
        VectorField Q = random_field(n - 1, N, L, rng, 1.0, 6, true);
        double res = check_hereditary_numeric(n, u, P, Q);
        pass = res < 1e-6;
        verdict["residual"] = res;
        verdict["tolerance"] = 1e-6;
    } else if (check == "nls-square") {
        pass = nls_square_identity();
        verdict["exact"] = pass;
    } else if (check == "lambda") {
        bool ok = true;
        for (long nu : {0L, 1L}) ok = ok && lambda_identities(n, Rat(nu)).all();
        pass = ok;
        verdict["exact"] = pass;
    } else if (check == "killing") {
        pass = killing_check(n);
        verdict["exact"] = pass;
    } else {
        std::cerr << "error: unknown check '" << check << "'\n";
        return 2;
    }
    verdict["pass"] = pass;
    std::string text = verdict.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        fs::path dir(out);
        fs::create_directories(dir);
        fs::path file = dir / ("verify_" + check + ".json");
        atomic_write(file, text);
        man.outputs.push_back(file.string());
        man.write(dir);
    }
    return pass ? 0 : 1;
}

static int run_hasimoto(const std::string& direction, const std::string& in,
                        const std::string& out) {
    Manifest man;
    man.command = "hasimoto " + direction;
    man.params = {{"direction", direction}, {"in", in}};
    man.inputs.push_back(in);
    VectorField f = read_csv(in);
    const int n = static_cast<int>(f.size()) + 1;
    fs::path dir(out.empty() ? "." : out);
    fs::create_directories(dir);
    json report;
    report["n"] = n;
    try {
        if (direction == "to-natural") {
            auto [u, th] = natural_from_frenet(n, f);
            fs::path file = dir / "natural.csv";
            atomic_write_csv(file, u);
            man.outputs.push_back(file.string());
            if (th.count() > 0) {
                fs::path af = dir / "angles.csv";
                atomic_write_csv(af, th.theta);
                man.outputs.push_back(af.string());
            }
            report["gauge_residual"] = gauge_residual(f, u, th);
        } else if (direction == "to-frenet") {
            auto [th, ubar] = angles_from_natural(n, f);
            fs::path file = dir / "frenet.csv";
            atomic_write_csv(file, ubar);
            man.outputs.push_back(file.string());
            report["gauge_residual"] = gauge_residual(ubar, f, th);
        } else {
            std::cerr << "error: direction must be to-natural or to-frenet\n";
            return 2;
        }
    } catch (const GimbalLock& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const PositivityLoss& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const BranchJump& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    fs::path rf = dir / "gauge_report.json";
    atomic_write(rf, report.dump(2) + "\n");
    man.outputs.push_back(rf.string());
    man.write(dir);
    return 0;
}

static int run_evolve(const std::string& in, double T, double dt, double kappa_c,
                      int record_every, const std::string& out) {
    Manifest man;
    man.command = "evolve";
    man.params = {{"in", in}, {"T", T},
                  {"dt", dt}, {"kappa_c", kappa_c},
                  {"record_every", record_every}};
    man.inputs.push_back(in);
    VectorField u0 = read_csv(in);
    FlowTrajectory traj;
    try {
        traj = evolve_vmkdv(u0, T, dt, kappa_c, record_every);
    } catch (const BlowUp& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const StabilityViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    fs::path dir(out.empty() ? "evolve_out" : out);
    fs::create_directories(dir);
    json tj;
    tj["dt"] = dt;
    tj["kappa_c"] = kappa_c;
    tj["times"] = traj.times;
    json rows = json::array();
    for (const auto& r : conserved_report(traj))
        rows.push_back({{"t", r.t}, {"e1", r.e1}, {"e2", r.e2},
                        {"drift1", r.drift1}, {"drift2", r.drift2}});
    tj["conserved"] = rows;
    for (size_t j = 0; j < traj.snapshots.size(); ++j) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%04zu.csv", j);
        fs::path file = dir / name;
        atomic_write_csv(file, traj.snapshots[j]);
        man.outputs.push_back(file.string());
    }
    fs::path tf = dir / "trajectory.json";
    atomic_write(tf, tj.dump(2) + "\n");
    man.outputs.push_back(tf.string());
    man.write(dir);
    return 0;
}

static int run_laxcheck(const std::string& trajdir, const std::vector<double>& lambdas,
                        double nu, const std::string& out) {
    Manifest man;
    man.command = "laxcheck";
    man.params = {{"traj", trajdir}, {"lambda", lambdas}, {"nu", nu}};
    fs::path dir(trajdir);
    std::ifstream is(dir / "trajectory.json");
    if (!is) {
        std::cerr << "error: " << (dir / "trajectory.json").string() << " not found\n";
        return 2;
    }
    json tj = json::parse(is);
    FlowTrajectory traj;
    traj.dt = tj["dt"].get<double>();
    traj.kappa_c = tj["kappa_c"].get<double>();
    traj.times = tj["times"].get<std::vector<double>>();
    for (size_t j = 0; j < traj.times.size(); ++j) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%04zu.csv", j);
        fs::path file = dir / name;
        man.inputs.push_back(file.string());
        traj.snapshots.push_back(read_csv(file.string()));
    }
    std::vector<ZeroCurvatureRow> rows;
    try {
        rows = zero_curvature_residual(traj, lambdas, nu);
    } catch (const InsufficientSnapshots& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    json rep;
    rep["n"] = static_cast<int>(traj.snapshots[0].size()) + 1;
    rep["nu"] = nu;
    json table = json::array();
    double worst = 0;
    for (const auto& r : rows) {
        table.push_back({{"lambda", r.lambda}, {"t", r.t}, {"residual", r.residual}});
        worst = std::max(worst, r.residual);
    }
    rep["rows"] = table;
    rep["max_residual"] = worst;
    std::string text = rep.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        fs::path odir(out);
        fs::create_directories(odir);
        fs::path file = odir / "laxcheck.json";
        atomic_write(file, text);
        man.outputs.push_back(file.string());
        man.write(odir);
    }
    return 0;
}

int main(int argc, char** argv) {
    CLI::App app{"vector mKdV toolkit: hierarchy, identity verification, "
                 "Hasimoto transforms, flow integration, Lax-pair residuals"};
    app.require_subcommand(1);

    int n = 3, N = 256, k = 1, record_every = 0;
    double dt = 1e-3, T = 1.0, kappa_c = 0.0, nu = 0.0;
    std::uint64_t seed = 0;
    std::string out, in, check, direction, trajdir;
    std::vector<double> lambdas = {0.5, 1.0, 2.0};

    auto* hier = app.add_subcommand("hierarchy", "write hierarchy member S_k");
    hier->add_option("-n", n, "ambient dimension (curvature has n-1 components)");
    hier->add_option("-k", k, "hierarchy index (0 = translation flow)");
    hier->add_option("--out", out, "output directory");

    auto* ver = app.add_subcommand("verify", "run a named identity check");
    ver->add_option("check", check,
                    "one of: symplectic, jacobi, hereditary, nls-square, lambda, killing")
        ->required();
    ver->add_option("-n", n, "ambient dimension");
    ver->add_option("-N", N, "grid size (power of two)");
    ver->add_option("--seed", seed, "PRNG seed (std::mt19937_64)");
    ver->add_option("--out", out, "output directory");

    auto* has = app.add_subcommand("hasimoto", "Frenet <-> natural curvatures");
    has->add_option("direction", direction, "to-natural or to-frenet")->required();
    has->add_option("in", in, "input CSV (x,comp1,...)")->required();
    has->add_option("--out", out, "output directory");

    auto* evo = app.add_subcommand("evolve", "integrate the vmKdV flow");
    evo->add_option("in", in, "initial condition CSV")->required();
    evo->add_option("-T", T, "final time");
    evo->add_option("--dt", dt, "time step");
    evo->add_option("--kappa-c", kappa_c, "constant-curvature parameter");
    evo->add_option("--record-every", record_every, "snapshot stride (0 = ends only)");
    evo->add_option("--out", out, "output directory");

    auto* lax = app.add_subcommand("laxcheck", "zero-curvature residual table");
    lax->add_option("traj", trajdir, "trajectory directory written by evolve")->required();
    lax->add_option("--lambda", lambdas, "spectral parameter samples");
    lax->add_option("--nu", nu, "spectral shift in beta = nu + <u,u>/2");
    lax->add_option("--out", out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (hier->parsed()) return run_hierarchy(n, k, out);
        if (ver->parsed()) return run_verify(check, n, N, seed, out);
        if (has->parsed()) return run_hasimoto(direction, in, out);
        if (evo->parsed()) return run_evolve(in, T, dt, kappa_c, record_every, out);
        if (lax->parsed()) return run_laxcheck(trajdir, lambdas, nu, out);
    } catch (const MaxOrderExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NestingDepth& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NonzeroMean& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConsistencyDrift& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
