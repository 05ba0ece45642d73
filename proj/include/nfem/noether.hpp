#pragma once

#include "nfem/fespace.hpp"
#include "nfem/lagrangian.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nfem {

// One-parameter symmetry group represented through its infinitesimals
// xi(x,u) (independent variables) and phi(x,u) (dependent variable).
struct Symmetry {
    std::function<Vec2(Vec2, double)> xi;
    std::function<Mat2(Vec2, double)> xi_jacobian; // J(i,j) = d xi_i / d x_j
    std::function<Vec2(Vec2, double)> xi_du;
    std::function<double(Vec2, double)> phi;
    std::function<Vec2(Vec2, double)> phi_dx;
    std::function<double(Vec2, double)> phi_du;
    bool depends_on_u = false;
};

// SO(2) generator: xi = (-x2, x1), phi = 0, div xi = 0
Symmetry rotation_symmetry();
// translation in the dependent variable: xi = 0, phi = 1
Symmetry translation_u_symmetry();

// characteristic Q = phi - xi . g
double characteristic(const Symmetry& sym, Vec2 x, double u, Vec2 g);

// Noether flux C = L xi + dL_dg (phi - xi . g)
Vec2 flux_C(const LagrangianModel& model, const Symmetry& sym, Vec2 x, double u, Vec2 g);

// Closed-form rotation flux for the 2-Laplacian L = |g|^2/2 - f u; kept as an
// independent cross-check of flux_C.
Vec2 flux_C_rotation_laplace(Vec2 x, double u, Vec2 g, double f_val);

struct ConservationResidual {
    double div_C = 0.0;        // fourth-order finite differences of flux_C
    double Q_times_EL = 0.0;   // Q * (-div dL_dg + dL_du), analytic
};

// Pointwise conservation identity for a smooth field: div C = -Q * EL(u)
// with the project-wide sign convention.
ConservationResidual conservation_residual(const LagrangianModel& model, const Symmetry& sym,
                                           const SmoothField& u, Vec2 x);

// Discrete Noether quantity of the finite element solution: volume terms
// (-div_K dL_dg + dL_du) P(phi) + (grad_K L) . xi + L div xi
// -/+ dL_dg . grad U div xi, plus the skeleton terms
// [[dL_dg]] {P(phi)} + [[L]] . {xi} over interior edges.
double discrete_noether(const FunctionSpace& space, const LagrangianModel& model,
                        const Symmetry& sym, const FEFunction& U);

// Weak conservation-law residual for a field that is smooth per piece; the
// interface integrals run over edges separating different pieces. One piece
// gives the weak law for smooth fields; pieces = triangles gives the broken
// version for finite element functions.
double weak_law_residual(const FunctionSpace& space, const LagrangianModel& model,
                         const Symmetry& sym, const std::vector<SmoothField>& piece_fields,
                         const std::vector<int>& piece_of_triangle);
double weak_law_residual(const FunctionSpace& space, const LagrangianModel& model,
                         const Symmetry& sym, const FEFunction& U);

struct NoetherReport {
    double N_value = 0.0;
    double E_total = 0.0;
    std::vector<double> element_indicators; // ||div C[U]||_{L2(K)}
    std::vector<double> edge_indicators;    // h_e^{1/2} ||[[C[U]]]||_{L2(e)}
    std::string to_json() const;
};

// Computable bound for the violation of the conservation law:
// E = (sum_K ||div C||^2)^{1/2} + (sum_e h_e ||[[C]]||^2)^{1/2}.
NoetherReport estimator(const FunctionSpace& space, const LagrangianModel& model,
                        const Symmetry& sym, const FEFunction& U);

// elementwise div C via the chain rule (Hessian of U, explicit x and u
// dependence through L, dL_dg and the infinitesimals)
double div_flux_C(const LagrangianModel& model, const Symmetry& sym, Vec2 x,
                  const FieldEval& u);

} // namespace nfem
