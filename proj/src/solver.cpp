#include "nfem/solver.hpp"

#include "nfem/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace nfem {

namespace {

Vec2 physical_point(const Mesh& m, int tri, const std::array<double, 3>& bary) {
    const auto& T = m.triangles[tri];
    return m.vertices[T.v[0]] * bary[0] + m.vertices[T.v[1]] * bary[1] +
           m.vertices[T.v[2]] * bary[2];
}

int default_volume_degree(const FunctionSpace& space, int requested) {
    if (requested > 0) return std::min(requested, 12);
    return std::min(2 * space.degree() + 3, 12);
}

double vec_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<std::vector<int>> dof_pattern(const FunctionSpace& space) {
    std::vector<std::vector<int>> pattern(space.dim());
    const Mesh& m = space.mesh();
    int nloc = space.nodes_per_cell();
    for (int t = 0; t < m.n_triangles(); ++t) {
        for (int a = 0; a < nloc; ++a) {
            int da = space.node_to_dof(space.cell_node(t, a));
            if (da < 0) continue;
            for (int b = 0; b < nloc; ++b) {
                int db = space.node_to_dof(space.cell_node(t, b));
                if (db >= 0) pattern[da].push_back(db);
            }
        }
    }
    for (auto& row : pattern) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return pattern;
}

} // namespace

std::vector<double> assemble_residual(const FunctionSpace& space, const LagrangianModel& model,
                                      const FEFunction& U, int quad_degree) {
    const Mesh& m = space.mesh();
    const TriangleRule& rule = triangle_rule(default_volume_degree(space, quad_degree));
    int nloc = space.nodes_per_cell();
    std::vector<double> R(space.dim(), 0.0);
    ElementBasis eb;
    for (int t = 0; t < m.n_triangles(); ++t) {
        double two_area = 2.0 * m.signed_area(t);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto& bary = rule.points[q];
            double w = rule.weights[q] * two_area;
            space.eval_basis(t, bary, eb);
            double uv = 0.0;
            Vec2 gu{0.0, 0.0};
            for (int l = 0; l < nloc; ++l) {
                double c = U.nodal()[space.cell_node(t, l)];
                uv += c * eb.value[l];
                gu += c * eb.grad[l];
            }
            Vec2 x = physical_point(m, t, bary);
            LagrangianState st = model.derivatives(x, uv, gu);
            for (int a = 0; a < nloc; ++a) {
                int da = space.node_to_dof(space.cell_node(t, a));
                if (da < 0) continue;
                R[da] += w * (dot(st.dL_dg, eb.grad[a]) + st.dL_du * eb.value[a]);
            }
        }
    }
    return R;
}

CsrMatrix assemble_jacobian(const FunctionSpace& space, const LagrangianModel& model,
                            const FEFunction& U, double eps, int quad_degree) {
    const Mesh& m = space.mesh();
    const TriangleRule& rule = triangle_rule(default_volume_degree(space, quad_degree));
    int nloc = space.nodes_per_cell();
    CsrMatrix J(dof_pattern(space));
    ElementBasis eb;
    for (int t = 0; t < m.n_triangles(); ++t) {
        double two_area = 2.0 * m.signed_area(t);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto& bary = rule.points[q];
            double w = rule.weights[q] * two_area;
            space.eval_basis(t, bary, eb);
            double uv = 0.0;
            Vec2 gu{0.0, 0.0};
            for (int l = 0; l < nloc; ++l) {
                double c = U.nodal()[space.cell_node(t, l)];
                uv += c * eb.value[l];
                gu += c * eb.grad[l];
            }
            Vec2 x = physical_point(m, t, bary);
            Mat2 D = model.flux_jacobian(x, uv, gu, eps);
            for (int a = 0; a < nloc; ++a) {
                int da = space.node_to_dof(space.cell_node(t, a));
                if (da < 0) continue;
                Vec2 Dga = D * eb.grad[a];
                for (int b = 0; b < nloc; ++b) {
                    int db = space.node_to_dof(space.cell_node(t, b));
                    if (db >= 0) J.add(da, db, w * dot(eb.grad[b], Dga));
                }
            }
        }
    }
    return J;
}

double energy(const FunctionSpace& space, const LagrangianModel& model, const FEFunction& U,
              int quad_degree) {
    const Mesh& m = space.mesh();
    const TriangleRule& rule = triangle_rule(default_volume_degree(space, quad_degree));
    KahanSum s;
    for (int t = 0; t < m.n_triangles(); ++t) {
        double two_area = 2.0 * m.signed_area(t);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto& bary = rule.points[q];
            FieldEval fe = U.eval(t, bary);
            Vec2 x = physical_point(m, t, bary);
            s.add(rule.weights[q] * two_area * model.derivatives(x, fe.value, fe.grad).L);
        }
    }
    return s.value();
}

NewtonResult newton_solve(const FunctionSpace& space, const LagrangianModel& model,
                          const NewtonConfig& config, const FEFunction& U0) {
    if (!(config.tolerance > 0.0) || config.max_iterations < 1)
        throw std::invalid_argument("newton_solve: invalid config");
    FEFunction U = U0;
    std::vector<double> history;
    std::vector<double> R = assemble_residual(space, model, U, config.quad_degree);
    double rnorm = vec_norm(R);
    history.push_back(rnorm);

    for (int it = 0; it < config.max_iterations; ++it) {
        if (rnorm <= config.tolerance)
            return {std::move(U), it, std::move(history)};

        CsrMatrix J = assemble_jacobian(space, model, U, config.jacobian_eps, config.quad_degree);
        std::vector<double> rhs(R.size());
        for (size_t i = 0; i < R.size(); ++i) rhs[i] = -R[i];
        std::vector<double> d;
        cg_solve(J, rhs, d, config.cg_rel_tol, 0.3 * config.tolerance);

        double lambda = 1.0;
        FEFunction U_try = U;
        bool accepted = false;
        for (int bt = 0; bt <= config.max_backtracks; ++bt) {
            U_try = U;
            auto& nod = U_try.nodal();
            for (size_t i = 0; i < d.size(); ++i)
                nod[space.dof_to_node(static_cast<int>(i))] += lambda * d[i];
            std::vector<double> R_try = assemble_residual(space, model, U_try, config.quad_degree);
            double r_try = vec_norm(R_try);
            if (r_try < rnorm || r_try <= config.tolerance) {
                U = std::move(U_try);
                R = std::move(R_try);
                rnorm = r_try;
                accepted = true;
                break;
            }
            lambda *= config.backtrack_factor;
        }
        history.push_back(rnorm);
        if (!accepted)
            throw NewtonFailure("newton_solve: backtracking failed to reduce the residual",
                                history);
    }
    if (rnorm <= config.tolerance)
        return {std::move(U), config.max_iterations, std::move(history)};
    throw NewtonFailure("newton_solve: maximum iterations exceeded", history);
}

NewtonResult solve_p_laplacian(const FunctionSpace& space, double p, const ScalarField& f,
                               const NewtonConfig& config, const FEFunction& U0) {
    std::vector<double> path = config.continuation;
    if (path.empty()) {
        if (p > 3.0) {
            for (double q = 2.0; q < p - 1e-12; q += 0.5) path.push_back(q);
        }
        path.push_back(p);
    }
    NewtonResult result{U0, 0, {}};
    FEFunction warm = U0;
    int total_iterations = 0;
    std::vector<double> history;
    for (double q : path) {
        PLaplacian model(q, f);
        result = newton_solve(space, model, config, warm);
        warm = result.U;
        total_iterations += result.iterations;
        history.insert(history.end(), result.residual_history.begin(),
                       result.residual_history.end());
    }
    result.iterations = total_iterations;
    result.residual_history = std::move(history);
    return result;
}

std::vector<double> linear_solve(const SparseSystem& system, double tol) {
    std::vector<double> x;
    cg_solve(system.matrix, system.rhs, x, tol, 0.0);
    return x;
}

} // namespace nfem
