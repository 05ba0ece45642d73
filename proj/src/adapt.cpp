#include "nfem/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace nfem {

std::vector<double> combine_indicators(const Mesh& mesh, const NoetherReport& report) {
    std::vector<double> combined(mesh.n_triangles(), 0.0);
    for (int t = 0; t < mesh.n_triangles(); ++t) combined[t] = report.element_indicators[t];
    for (size_t e = 0; e < mesh.interior_edges.size(); ++e) {
        const auto& ie = mesh.interior_edges[e];
        combined[ie.tri_left] += 0.5 * report.edge_indicators[e];
        combined[ie.tri_right] += 0.5 * report.edge_indicators[e];
    }
    return combined;
}

std::vector<int> mark_maximum(const std::vector<double>& indicators, double theta) {
    if (!(theta > 0.0) || theta > 1.0)
        throw std::invalid_argument("mark_maximum: theta must be in (0,1]");
    double max_ind = 0.0;
    for (double v : indicators) max_ind = std::max(max_ind, v);
    std::vector<int> marked;
    if (max_ind <= 0.0) return marked;
    for (size_t i = 0; i < indicators.size(); ++i)
        if (indicators[i] >= theta * max_ind) marked.push_back(static_cast<int>(i));
    return marked;
}

std::string AdaptTrace::to_csv() const {
    std::ostringstream os;
    os << "round,dofs,E,N,lp_err,w1p_err,h_max,n_triangles\n";
    char buf[256];
    for (const auto& r : rounds) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.15g,%.15g,%.15g,%.15g,%.15g,%d\n", r.round,
                      r.dofs, r.E, r.N, r.lp_err, r.w1p_err, r.h_max, r.n_triangles);
        os << buf;
    }
    return os.str();
}

AdaptTrace adapt_loop(const AdaptProblem& problem, const AdaptConfig& config) {
    if (!(config.theta > 0.0) || config.theta > 1.0)
        throw std::invalid_argument("adapt_loop: theta must be in (0,1]");
    AdaptTrace trace;
    auto mesh = std::make_shared<Mesh>(problem.initial_mesh);
    PLaplacian model(problem.p, problem.f);

    std::unique_ptr<FunctionSpace> prev_space;
    std::unique_ptr<FEFunction> prev_U;
    std::vector<int> parent; // new triangle -> previous-mesh triangle

    for (int round = 0; round < config.max_rounds; ++round) {
        auto space = std::make_unique<FunctionSpace>(mesh, problem.degree);
        FEFunction U0(*space);
        if (prev_U) {
            U0 = transfer_nodal(*prev_U, *space, parent);
        }
        if (problem.boundary_values) {
            for (int n = 0; n < space->n_nodes(); ++n)
                if (space->node_on_boundary(n))
                    U0.nodal()[n] = problem.boundary_values(space->node_position(n));
        }

        NewtonResult sol{U0, 0, {}};
        try {
            sol = solve_p_laplacian(*space, problem.p, problem.f, config.newton, U0);
        } catch (const NewtonFailure&) {
            trace.solver_failed = true;
            trace.final_mesh = *mesh;
            return trace;
        }

        NoetherReport report = estimator(*space, model, problem.sym, sol.U);

        AdaptRound row;
        row.round = round;
        row.dofs = space->dim();
        row.E = report.E_total;
        row.N = report.N_value;
        row.h_max = mesh->max_diameter();
        row.n_triangles = mesh->n_triangles();
        if (problem.exact) {
            ErrorNorms err = error_norms(sol.U, problem.exact->value, problem.exact->gradient,
                                         std::max(problem.p, 2.0));
            row.lp_err = err.lp;
            row.w1p_err = err.w1p_seminorm;
        }
        trace.rounds.push_back(row);

        if (report.E_total <= config.target_E) {
            trace.reached_target = true;
            break;
        }
        if (space->dim() >= config.max_dofs) break;

        std::vector<int> marked = mark_maximum(combine_indicators(*mesh, report), config.theta);
        if (marked.empty()) break;

        RefineResult refined = bisect(*mesh, marked);
        parent = refined.parent;
        prev_U = std::make_unique<FEFunction>(sol.U);
        prev_space = std::move(space);
        mesh = std::make_shared<Mesh>(std::move(refined.mesh));
    }
    trace.final_mesh = *mesh;
    return trace;
}

} // namespace nfem
