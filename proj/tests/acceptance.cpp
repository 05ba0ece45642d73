// Acceptance suite: runs the benchmark studies end to end and prints one
// PASS/FAIL line per criterion. Exit status 0 iff all criteria hold.

#include "nfem/adapt.hpp"
#include "nfem/benchmarks.hpp"
#include "nfem/cli.hpp"
#include "nfem/noether.hpp"
#include "nfem/solver.hpp"
#include "nfem/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <string>
#include <vector>

using namespace nfem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct ConvergenceRun {
    std::vector<double> lp, w1p, h, N, residual;
    std::vector<int> dofs;
    bool converged = true;
};

ConvergenceRun run_disk(double p, int levels, int degree) {
    ConvergenceRun out;
    Benchmark bench = disk_benchmark(p);
    NewtonConfig cfg;
    for (int level = 0; level < levels; ++level) {
        auto mesh = std::make_shared<Mesh>(build_disk_mesh(level));
        FunctionSpace space(mesh, degree);
        FEFunction U0(space);
        try {
            NewtonResult sol = solve_p_laplacian(space, p, bench.f, cfg, U0);
            ErrorNorms err = error_norms(sol.U, bench.exact.value, bench.exact.gradient, p);
            PLaplacian model(p, bench.f);
            double N = discrete_noether(space, model, rotation_symmetry(), sol.U);
            out.lp.push_back(err.lp);
            out.w1p.push_back(err.w1p_seminorm);
            out.h.push_back(mesh->max_diameter());
            out.N.push_back(N);
            out.residual.push_back(sol.residual_history.back());
            out.dofs.push_back(space.dim());
        } catch (const NewtonFailure&) {
            out.converged = false;
            break;
        }
    }
    return out;
}

// criteria 1 and 2: discrete conservation and convergence rates on the disk
void criteria_1_2() {
    auto t0 = std::chrono::steady_clock::now();
    const int levels = 8; // reaches ~1.3e5 interior dofs at the finest level
    bool conservation_ok = true, rates_ok = true;
    std::string detail1, detail2;
    for (double p : {3.0, 4.0, 5.0}) {
        ConvergenceRun run = run_disk(p, levels, 1);
        if (!run.converged || static_cast<int>(run.N.size()) < levels) {
            conservation_ok = false;
            detail1 += " p=" + std::to_string(p) + " solver failed;";
            continue;
        }
        double worstN = 0.0, worstR = 0.0;
        for (double n : run.N) worstN = std::max(worstN, std::abs(n));
        for (double r : run.residual) worstR = std::max(worstR, r);
        bool okN = worstN <= 1e-8 && worstR <= 1e-10 && run.dofs.back() >= 10000;
        conservation_ok = conservation_ok && okN;
        char buf[160];
        std::snprintf(buf, sizeof buf, " p=%g max|N|=%.3g max_res=%.3g dofs=%d;", p, worstN,
                      worstR, run.dofs.back());
        detail1 += buf;

        auto eoc_last = [&](const std::vector<double>& v) {
            size_t i = v.size() - 2;
            return std::log(v[i + 1] / v[i]) / std::log(run.h[i + 1] / run.h[i]);
        };
        double lp_rate = eoc_last(run.lp);
        double w1p_rate = eoc_last(run.w1p);
        bool okR = w1p_rate >= 1.0 && lp_rate >= 1.9;
        rates_ok = rates_ok && okR;
        std::snprintf(buf, sizeof buf, " p=%g EOC(W1p)=%.3f EOC(Lp)=%.3f;", p, w1p_rate, lp_rate);
        detail2 += buf;
    }
    char t[64];
    std::snprintf(t, sizeof t, " [%.0fs]", elapsed_s(t0));
    report(1, conservation_ok,
           "|N[U]| <= 1e-8 and residual <= 1e-10 on >= 5 disk levels up to >= 1e4 dofs:" +
               detail1 + t);
    report(2, rates_ok, "last-level EOCs, W1p >= 1.0 and Lp >= 1.9:" + detail2);
}

// criterion 3: estimator rate on the square, k = 1, 2, 3
void criterion_3() {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    struct Setup {
        int k;
        int levels;
    };
    for (Setup s : {Setup{1, 6}, Setup{2, 5}, Setup{3, 4}}) {
        RunConfig cfg;
        cfg.cmd = "estimator";
        cfg.domain = "square";
        cfg.k = s.k;
        cfg.levels = s.levels;
        cfg.seed = 1;
        Table table = run_estimator(cfg);
        // EOC of E over the last three levels = the last two EOC entries
        double e1 = table.rows[s.levels - 2][6];
        double e2 = table.rows[s.levels - 1][6];
        double rate = std::min(e1, e2);
        bool okk = rate >= s.k - 0.2;
        ok = ok && okk;
        char buf[96];
        std::snprintf(buf, sizeof buf, " k=%d EOC(E)=%.3f (need %.1f);", s.k, rate, s.k - 0.2);
        detail += buf;
    }
    char t[64];
    std::snprintf(t, sizeof t, " [%.0fs]", elapsed_s(t0));
    report(3, ok, "estimator EOC over the last three uniform levels:" + detail + t);
}

// criterion 4: adaptivity reaches the uniform E with <= 1/5 of the dofs
void criterion_4() {
    auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg;
    cfg.cmd = "estimator";
    cfg.domain = "square";
    cfg.k = 1;
    cfg.square_n = 6;
    cfg.levels = 7; // ~3e5 dofs at the finest level
    cfg.seed = 1;
    Table uniform = run_estimator(cfg);
    int uniform_dofs = static_cast<int>(uniform.rows.back()[0]);
    double uniform_E = uniform.rows.back()[5];

    Benchmark bench = square_benchmark();
    AdaptProblem problem;
    problem.initial_mesh = build_square_mesh(6, 1, 0.2);
    problem.degree = 1;
    problem.p = bench.p;
    problem.f = bench.f;
    problem.sym = rotation_symmetry();
    problem.boundary_values = bench.boundary_values;

    AdaptConfig acfg;
    acfg.theta = 0.65;
    acfg.target_E = uniform_E;
    acfg.max_rounds = 150;
    acfg.max_dofs = uniform_dofs;
    AdaptTrace trace = adapt_loop(problem, acfg);

    int adaptive_dofs = trace.rounds.back().dofs;
    bool ok = trace.reached_target && 5 * adaptive_dofs <= uniform_dofs;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "uniform E=%.4g at %d dofs; adaptive (theta=0.65) reached E=%.4g at %d dofs "
                  "(ratio %.1fx) [%.0fs]",
                  uniform_E, uniform_dofs, trace.rounds.back().E, adaptive_dofs,
                  adaptive_dofs > 0 ? static_cast<double>(uniform_dofs) / adaptive_dofs : 0.0,
                  elapsed_s(t0));
    report(4, ok, buf);
}

// criterion 5: pointwise Noether identity with one consistent sign
void criterion_5() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    // a radial source keeps rotations variational; translation in u requires
    // a Lagrangian independent of u and is paired with f = 0
    ScalarField radial = {[](Vec2 x) { return std::exp(-norm2(x)); },
                          [](Vec2 x) { return (-2.0 * std::exp(-norm2(x))) * x; }};
    PLaplacian rot_model(2.0, radial);
    PLaplacian trans_model(2.0, ScalarField::zero());
    double worst = 0.0;
    for (int field = 0; field < 5; ++field) {
        std::array<double, 10> c;
        for (auto& v : c) v = u(rng);
        SmoothField poly = {
            [c](Vec2 x) {
                return c[0] + c[1] * x.x + c[2] * x.y + c[3] * x.x * x.x + c[4] * x.x * x.y +
                       c[5] * x.y * x.y + c[6] * x.x * x.x * x.x + c[7] * x.x * x.x * x.y +
                       c[8] * x.x * x.y * x.y + c[9] * x.y * x.y * x.y;
            },
            [c](Vec2 x) {
                return Vec2{c[1] + 2 * c[3] * x.x + c[4] * x.y + 3 * c[6] * x.x * x.x +
                                2 * c[7] * x.x * x.y + c[8] * x.y * x.y,
                            c[2] + c[4] * x.x + 2 * c[5] * x.y + c[7] * x.x * x.x +
                                2 * c[8] * x.x * x.y + 3 * c[9] * x.y * x.y};
            },
            [c](Vec2 x) {
                double hxx = 2 * c[3] + 6 * c[6] * x.x + 2 * c[7] * x.y;
                double hxy = c[4] + 2 * c[7] * x.x + 2 * c[8] * x.y;
                double hyy = 2 * c[5] + 2 * c[8] * x.x + 6 * c[9] * x.y;
                return Mat2{hxx, hxy, hxy, hyy};
            },
        };
        struct Pair {
            const PLaplacian* model;
            Symmetry sym;
        };
        for (const Pair& pr : {Pair{&rot_model, rotation_symmetry()},
                               Pair{&trans_model, translation_u_symmetry()}}) {
            for (int trial = 0; trial < 8; ++trial) {
                Vec2 x{u(rng), u(rng)};
                ConservationResidual r = conservation_residual(*pr.model, pr.sym, poly, x);
                double rel = std::abs(r.div_C + r.Q_times_EL) /
                             std::max(1.0, std::abs(r.Q_times_EL));
                worst = std::max(worst, rel);
            }
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "div C = -Q*EL for 5 random polynomial fields, both symmetries: "
                  "max rel dev %.3g (tol 1e-6)",
                  worst);
    report(5, worst <= 1e-6, buf);
}

// criterion 6: broken-extremal law for u = |x1|
void criterion_6() {
    auto mesh = std::make_shared<Mesh>(build_square_mesh(4, 1, 0.0));
    FunctionSpace space(mesh, 1);
    PLaplacian model(2.0, ScalarField::zero());
    std::vector<SmoothField> pieces = {
        {[](Vec2 x) { return -x.x; }, [](Vec2) { return Vec2{-1.0, 0.0}; },
         [](Vec2) { return Mat2{}; }},
        {[](Vec2 x) { return x.x; }, [](Vec2) { return Vec2{1.0, 0.0}; },
         [](Vec2) { return Mat2{}; }},
    };
    std::vector<int> piece(mesh->n_triangles());
    for (int t = 0; t < mesh->n_triangles(); ++t) {
        const auto& T = mesh->triangles[t];
        Vec2 c = (mesh->vertices[T.v[0]] + mesh->vertices[T.v[1]] + mesh->vertices[T.v[2]]) / 3.0;
        piece[t] = c.x < 0.0 ? 0 : 1;
    }
    double r = weak_law_residual(space, model, translation_u_symmetry(), pieces, piece);
    char buf[128];
    std::snprintf(buf, sizeof buf, "weak law residual for u=|x1| is %.15g (analytic -4, tol 1e-10)",
                  r);
    report(6, std::abs(r + 4.0) <= 1e-10, buf);
}

// criterion 7: structural property suite
void criterion_7() {
    auto t0 = std::chrono::steady_clock::now();
    auto results = run_verify_suite(1);
    bool ok = true;
    std::string bad;
    for (const auto& r : results) {
        if (!r.pass) {
            ok = false;
            bad += " " + r.name;
        }
    }
    char buf[192];
    std::snprintf(buf, sizeof buf, "%zu structural properties%s%s [%.0fs]", results.size(),
                  ok ? ", all green" : ", FAILED:", bad.c_str(), elapsed_s(t0));
    report(7, ok, buf);
}

} // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    criteria_1_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    std::printf("acceptance total: %.0fs, %d failure(s)\n", elapsed_s(t0), failures);
    return failures == 0 ? 0 : 1;
}
