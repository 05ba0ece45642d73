#include "nfem/cli.hpp"

#include "nfem/benchmarks.hpp"
#include "nfem/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace nfem {

namespace {

Symmetry symmetry_by_name(const std::string& name) {
    if (name == "rotation") return rotation_symmetry();
    if (name == "translation-u") return translation_u_symmetry();
    throw std::invalid_argument("unknown symmetry: " + name);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) return;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file " + path);
    f << text;
}

std::string format_cell(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

} // namespace

std::string Table::to_csv() const {
    std::ostringstream os;
    for (size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << "\n";
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_cell(row[c]);
        os << "\n";
    }
    return os.str();
}

Table run_convergence(const RunConfig& config) {
    if (config.domain != "disk")
        throw std::invalid_argument("run_convergence: benchmark is defined on the disk");
    Benchmark bench = disk_benchmark(config.p);
    Symmetry sym = symmetry_by_name(config.sym);
    NewtonConfig newton;
    newton.tolerance = config.newton_tol;

    Table table;
    table.columns = {"dim",  "Lp_error", "EOC",          "W1p_error", "EOC",
                     "N",    "h",        "newton_iters", "residual"};
    std::vector<double> lp_hist, w1p_hist, h_hist;
    for (int level = 0; level < config.levels; ++level) {
        auto mesh = std::make_shared<Mesh>(build_disk_mesh(level));
        FunctionSpace space(mesh, config.k);
        FEFunction U0(space);
        NewtonResult sol = solve_p_laplacian(space, config.p, bench.f, newton, U0);

        ErrorNorms err = error_norms(sol.U, bench.exact.value, bench.exact.gradient, config.p);
        PLaplacian model(config.p, bench.f);
        double N = discrete_noether(space, model, sym, sol.U);
        double h = mesh->max_diameter();

        lp_hist.push_back(err.lp);
        w1p_hist.push_back(err.w1p_seminorm);
        h_hist.push_back(h);
        double eoc_lp = 0.0, eoc_w1p = 0.0;
        if (level > 0) {
            size_t i = lp_hist.size() - 2;
            eoc_lp = std::log(lp_hist[i + 1] / lp_hist[i]) / std::log(h_hist[i + 1] / h_hist[i]);
            eoc_w1p =
                std::log(w1p_hist[i + 1] / w1p_hist[i]) / std::log(h_hist[i + 1] / h_hist[i]);
        }
        table.rows.push_back({static_cast<double>(space.dim()), err.lp, eoc_lp,
                              err.w1p_seminorm, eoc_w1p, N, h,
                              static_cast<double>(sol.iterations),
                              sol.residual_history.back()});
    }
    write_text(config.out, table.to_csv());
    return table;
}

Table run_estimator(const RunConfig& config) {
    if (config.domain != "square")
        throw std::invalid_argument("run_estimator: benchmark is defined on the square");
    Benchmark bench = square_benchmark();
    if (config.zero_source) {
        bench.f = ScalarField::zero();
        bench.exact = {[](Vec2) { return 0.0; }, [](Vec2) { return Vec2{0.0, 0.0}; },
                       [](Vec2) { return Mat2{}; }};
        bench.boundary_values = nullptr;
    }
    Symmetry sym = symmetry_by_name(config.sym);
    NewtonConfig newton;
    newton.tolerance = config.newton_tol;

    Table table;
    table.columns = {"dofs", "L2_error", "EOC", "H1_error", "EOC", "E", "EOC", "h"};
    std::vector<double> l2_hist, h1_hist, e_hist, h_hist;
    std::string last_report_json;

    Mesh mesh0 = build_square_mesh(config.square_n, config.seed, 0.2);
    std::shared_ptr<Mesh> mesh = std::make_shared<Mesh>(mesh0);
    for (int level = 0; level < config.levels; ++level) {
        if (level > 0) mesh = std::make_shared<Mesh>(uniform_refine(*mesh).mesh);
        FunctionSpace space(mesh, config.k);
        FEFunction U0(space);
        if (bench.boundary_values) {
            for (int n = 0; n < space.n_nodes(); ++n)
                if (space.node_on_boundary(n))
                    U0.nodal()[n] = bench.boundary_values(space.node_position(n));
        }
        PLaplacian model(bench.p, bench.f);
        NewtonResult sol = newton_solve(space, model, newton, U0);
        ErrorNorms err = error_norms(sol.U, bench.exact.value, bench.exact.gradient, 2.0);
        NoetherReport rep = estimator(space, model, sym, sol.U);
        last_report_json = rep.to_json();
        double h = mesh->max_diameter();

        l2_hist.push_back(err.lp);
        h1_hist.push_back(err.w1p_seminorm);
        e_hist.push_back(rep.E_total);
        h_hist.push_back(h);
        auto local_eoc = [&](const std::vector<double>& v) {
            size_t i = v.size() - 2;
            if (v[i] <= 0.0 || v[i + 1] <= 0.0) return 0.0;
            return std::log(v[i + 1] / v[i]) / std::log(h_hist[i + 1] / h_hist[i]);
        };
        double e_l2 = 0.0, e_h1 = 0.0, e_e = 0.0;
        if (level > 0) {
            e_l2 = local_eoc(l2_hist);
            e_h1 = local_eoc(h1_hist);
            e_e = local_eoc(e_hist);
        }
        table.rows.push_back({static_cast<double>(space.dim()), err.lp, e_l2,
                              err.w1p_seminorm, e_h1, rep.E_total, e_e, h});
    }
    write_text(config.out, table.to_csv());
    if (!config.out.empty()) write_text(config.out + ".json", last_report_json + "\n");
    return table;
}

AdaptTrace run_adapt(const RunConfig& config) {
    if (config.domain != "square")
        throw std::invalid_argument("run_adapt: benchmark is defined on the square");
    Benchmark bench = square_benchmark();
    AdaptProblem problem;
    problem.initial_mesh = build_square_mesh(config.square_n, config.seed, 0.2);
    problem.degree = config.k;
    problem.p = bench.p;
    problem.f = bench.f;
    problem.sym = symmetry_by_name(config.sym);
    problem.boundary_values = bench.boundary_values;
    problem.exact = bench.exact;

    AdaptConfig acfg;
    acfg.theta = config.theta;
    acfg.target_E = config.target_e;
    acfg.max_dofs = config.max_dofs;
    acfg.max_rounds = config.max_rounds;
    acfg.newton.tolerance = config.newton_tol;

    AdaptTrace trace = adapt_loop(problem, acfg);
    write_text(config.out, trace.to_csv());
    if (!config.out.empty()) write_mesh(trace.final_mesh, config.out + ".mesh");
    return trace;
}

int run_verify(const RunConfig& config) {
    std::vector<PropertyResult> results = run_verify_suite(config.seed);
    std::ostringstream os;
    os << "status,property,measured,threshold\n";
    bool all_pass = true;
    for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        os << (r.pass ? "PASS" : "FAIL") << "," << r.name << "," << format_cell(r.measured)
           << "," << format_cell(r.threshold) << "\n";
    }
    std::cout << os.str();
    write_text(config.out, os.str());
    return all_pass ? 0 : 2;
}

int cli_main(int argc, char** argv) {
    RunConfig config;
    CLI::App app{"Adaptive FEM toolkit with Noether conservation diagnostics"};
    app.add_option("--cmd", config.cmd, "convergence | estimator | adapt | verify")->required();
    app.add_option("--domain", config.domain, "disk | square");
    app.add_option("--p", config.p, "p-Laplacian exponent");
    app.add_option("--k", config.k, "polynomial degree (1,2,3)");
    app.add_option("--levels", config.levels, "number of refinement levels");
    app.add_option("--sym", config.sym, "rotation | translation-u");
    app.add_option("--theta", config.theta, "maximum-strategy marking fraction");
    app.add_option("--target-e", config.target_e, "adaptive target for E(U,f)");
    app.add_option("--seed", config.seed, "random seed for mesh jitter");
    app.add_option("--out", config.out, "output CSV path");
    app.add_option("--newton-tol", config.newton_tol, "Newton residual tolerance");
    app.add_option("--n", config.square_n, "initial square grid size");
    app.add_option("--max-dofs", config.max_dofs, "adaptive dof budget");
    app.add_option("--max-rounds", config.max_rounds, "adaptive round budget");
    app.add_flag("--zero-source", config.zero_source, "use f = 0 in the estimator run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (config.cmd == "convergence") {
            Table t = run_convergence(config);
            std::cout << t.to_csv();
            return 0;
        }
        if (config.cmd == "estimator") {
            if (config.domain == "disk") config.domain = "square";
            Table t = run_estimator(config);
            std::cout << t.to_csv();
            return 0;
        }
        if (config.cmd == "adapt") {
            if (config.domain == "disk") config.domain = "square";
            AdaptTrace t = run_adapt(config);
            std::cout << t.to_csv();
            if (t.solver_failed) return 1;
            return 0;
        }
        if (config.cmd == "verify") {
            return run_verify(config);
        }
        std::cerr << "unknown command: " << config.cmd << "\n";
        return 1;
    } catch (const NewtonFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace nfem
