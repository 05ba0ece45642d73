#include "nfem/lagrangian.hpp"

#include <cmath>
#include <stdexcept>

namespace nfem {

PLaplacian::PLaplacian(double p, ScalarField f, double eps)
    : p_(p), f_(std::move(f)), eps_(eps) {
    if (!(p_ > 1.0)) throw std::invalid_argument("PLaplacian: p must exceed 1");
    if (eps_ < 0.0) throw std::invalid_argument("PLaplacian: eps must be >= 0");
}

LagrangianState PLaplacian::derivatives(Vec2 x, double u, Vec2 g) const {
    double s = norm2(g) + eps_;
    if (s == 0.0 && p_ < 2.0)
        throw std::domain_error("PLaplacian: flux singular at g = 0 for p < 2");
    LagrangianState st;
    double fv = f_.value(x);
    double a = (p_ == 2.0) ? 1.0 : std::pow(s, 0.5 * p_ - 1.0);
    st.L = (s == 0.0 ? 0.0 : std::pow(s, 0.5 * p_) / p_) - fv * u;
    st.dL_du = -fv;
    st.dL_dg = a * g;
    st.dL_dx = -u * f_.gradient(x);
    st.d2L_dgdg = a * Mat2::identity();
    if (p_ != 2.0 && s > 0.0)
        st.d2L_dgdg += ((p_ - 2.0) * a / s) * Mat2::outer(g, g);
    return st;
}

Mat2 PLaplacian::flux_jacobian(Vec2 x, double u, Vec2 g, double eps) const {
    (void)x;
    (void)u;
    double s = norm2(g) + eps_ + eps;
    if (s == 0.0 && p_ < 2.0)
        throw std::domain_error("PLaplacian: flux singular at g = 0 for p < 2");
    double a = (p_ == 2.0) ? 1.0 : std::pow(s, 0.5 * p_ - 1.0);
    Mat2 J = a * Mat2::identity();
    if (p_ != 2.0 && s > 0.0) J += ((p_ - 2.0) * a / s) * Mat2::outer(g, g);
    return J;
}

Vec2 total_gradient_L(const LagrangianModel& model, const FEFunction& U, int tri,
                      const std::array<double, 3>& bary) {
    const Mesh& m = U.space().mesh();
    const auto& T = m.triangles[tri];
    Vec2 x = m.vertices[T.v[0]] * bary[0] + m.vertices[T.v[1]] * bary[1] +
             m.vertices[T.v[2]] * bary[2];
    FieldEval fe = U.eval(tri, bary);
    LagrangianState st = model.derivatives(x, fe.value, fe.grad);
    return st.dL_dx + st.dL_du * fe.grad + fe.hess * st.dL_dg;
}

namespace {

// f(t) = -4 pi A(t) B(t) with t = |x|^2, c = cos(pi t), s = sin(pi t),
//   A = (4 pi^2 t c^2)^{(p-2)/2}   (the flux weight |grad u|^{p-2})
//   B = c - pi t s + (p-2)/2 (c - 2 pi t s)
struct RadialParts {
    double A, B, Ap, Bp; // values and t-derivatives
};

RadialParts radial_parts(double p, double t) {
    double c = std::cos(M_PI * t);
    double s = std::sin(M_PI * t);
    RadialParts r;
    double pm2 = p - 2.0;
    double B = c - M_PI * t * s + 0.5 * pm2 * (c - 2.0 * M_PI * t * s);
    double Bp = -2.0 * M_PI * s - M_PI * M_PI * t * c -
                0.5 * pm2 * (3.0 * M_PI * s + 2.0 * M_PI * M_PI * t * c);
    double A, Ap;
    if (p == 2.0) {
        A = 1.0;
        Ap = 0.0;
    } else {
        double cp = std::pow(4.0 * M_PI * M_PI, 0.5 * pm2);
        double m = t * c * c;
        A = cp * std::pow(m, 0.5 * pm2);
        // m^{(p-4)/2} m' = t^{(p-4)/2} sign(c) |c|^{p-3} (c - 2 pi t s)
        double tpow = std::pow(t, 0.5 * (p - 4.0));
        double cpow = std::copysign(std::pow(std::abs(c), p - 3.0), c);
        Ap = cp * 0.5 * pm2 * tpow * cpow * (c - 2.0 * M_PI * t * s);
    }
    r.A = A;
    r.B = B;
    r.Ap = Ap;
    r.Bp = Bp;
    return r;
}

} // namespace

double manufactured_f(double p, Vec2 x) {
    if (!(p > 1.0)) throw std::invalid_argument("manufactured_f: p must exceed 1");
    double t = norm2(x);
    if (t == 0.0) {
        if (p == 2.0) return -4.0 * M_PI;
        return 0.0; // analytic limit for p > 2; p < 2 is singular at the origin
    }
    RadialParts r = radial_parts(p, t);
    return -4.0 * M_PI * r.A * r.B;
}

Vec2 manufactured_f_gradient(double p, Vec2 x) {
    if (!(p > 1.0)) throw std::invalid_argument("manufactured_f_gradient: p must exceed 1");
    double t = norm2(x);
    if (t == 0.0) return {0.0, 0.0};
    RadialParts r = radial_parts(p, t);
    double df_dt = -4.0 * M_PI * (r.Ap * r.B + r.A * r.Bp);
    return (2.0 * df_dt) * x;
}

} // namespace nfem
