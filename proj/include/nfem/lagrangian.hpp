#pragma once

#include "nfem/fespace.hpp"
#include "nfem/geometry.hpp"

#include <functional>
#include <memory>

namespace nfem {

// Scalar field together with its spatial gradient.
struct ScalarField {
    std::function<double(Vec2)> value;
    std::function<Vec2(Vec2)> gradient;

    static ScalarField zero() {
        return {[](Vec2) { return 0.0; }, [](Vec2) { return Vec2{0.0, 0.0}; }};
    }
    static ScalarField constant(double c) {
        return {[c](Vec2) { return c; }, [](Vec2) { return Vec2{0.0, 0.0}; }};
    }
};

// Twice differentiable field, used for exact solutions and smooth test fields.
struct SmoothField {
    std::function<double(Vec2)> value;
    std::function<Vec2(Vec2)> gradient;
    std::function<Mat2(Vec2)> hessian;
};

// All derivatives of the density L(x, u, g) needed downstream.
struct LagrangianState {
    double L = 0.0;
    double dL_du = 0.0;
    Vec2 dL_dg;
    Vec2 dL_dx;      // explicit spatial derivative, u and g held fixed
    Mat2 d2L_dgdg;   // symmetric
    Vec2 d2L_dgdu;
    Mat2 d2L_dgdx;   // row i: d(dL_dg_i)/dx
};

class LagrangianModel {
public:
    virtual ~LagrangianModel() = default;
    virtual LagrangianState derivatives(Vec2 x, double u, Vec2 g) const = 0;
    // flux Jacobian with extra regularization, used inside Newton
    virtual Mat2 flux_jacobian(Vec2 x, double u, Vec2 g, double eps) const = 0;
};

// L(x,u,g) = (1/p) (|g|^2 + eps)^{p/2} - f(x) u
class PLaplacian : public LagrangianModel {
public:
    PLaplacian(double p, ScalarField f, double eps = 0.0);

    double exponent() const { return p_; }
    const ScalarField& source() const { return f_; }

    LagrangianState derivatives(Vec2 x, double u, Vec2 g) const override;
    Mat2 flux_jacobian(Vec2 x, double u, Vec2 g, double eps) const override;

private:
    double p_;
    ScalarField f_;
    double eps_;
};

// total spatial derivative of x -> L(x, U(x), grad U(x)) inside triangle K
Vec2 total_gradient_L(const LagrangianModel& model, const FEFunction& U, int tri,
                      const std::array<double, 3>& bary);

// Source making u = sin(pi |x|^2) solve -div(|grad u|^{p-2} grad u) = f,
// together with its gradient (closed forms).
double manufactured_f(double p, Vec2 x);
Vec2 manufactured_f_gradient(double p, Vec2 x);

} // namespace nfem
