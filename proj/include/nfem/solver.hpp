#pragma once

#include "nfem/fespace.hpp"
#include "nfem/lagrangian.hpp"
#include "nfem/linalg.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace nfem {

struct NewtonConfig {
    double tolerance = 1e-10;     // Euclidean norm of the assembled residual
    int max_iterations = 50;
    double backtrack_factor = 0.5;
    int max_backtracks = 20;
    double jacobian_eps = 1e-10;  // regularization inside the Jacobian only
    double cg_rel_tol = 1e-12;
    int quad_degree = -1;         // default 2k+3
    // continuation path in the exponent; empty = solve the target directly
    std::vector<double> continuation;
};

struct NewtonResult {
    FEFunction U;
    int iterations = 0;
    std::vector<double> residual_history;
};

class NewtonFailure : public std::runtime_error {
public:
    NewtonFailure(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

// residual of the discrete Euler-Lagrange equations over interior dofs:
// R_i = int dL_dg(x,U,grad U) . grad V_i + dL_du V_i
std::vector<double> assemble_residual(const FunctionSpace& space, const LagrangianModel& model,
                                      const FEFunction& U, int quad_degree = -1);

// Gateaux derivative: J_ij = int grad V_j^T d2L_dgdg(grad U) grad V_i,
// with eps-regularized d2L_dgdg
CsrMatrix assemble_jacobian(const FunctionSpace& space, const LagrangianModel& model,
                            const FEFunction& U, double eps, int quad_degree = -1);

// int_Omega L(x, U, grad U)
double energy(const FunctionSpace& space, const LagrangianModel& model, const FEFunction& U,
              int quad_degree = -1);

// Damped Newton on the discrete Euler-Lagrange equations. Boundary nodal
// values of U0 are kept fixed (Dirichlet lift). Throws NewtonFailure when the
// iteration or backtracking budget is exhausted.
NewtonResult newton_solve(const FunctionSpace& space, const LagrangianModel& model,
                          const NewtonConfig& config, const FEFunction& U0);

// Continuation driver for the p-Laplacian: solves exponents 2, 2.5, ... up to
// p (steps <= 0.5), warm-starting each stage. Engaged by default for p > 3 or
// when config.continuation is non-empty.
NewtonResult solve_p_laplacian(const FunctionSpace& space, double p, const ScalarField& f,
                               const NewtonConfig& config, const FEFunction& U0);

// Jacobi-CG on a SparseSystem, relative residual <= tol.
std::vector<double> linear_solve(const SparseSystem& system, double tol = 1e-10);

} // namespace nfem
