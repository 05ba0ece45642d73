#include "nfem/noether.hpp"

#include "nfem/quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nfem {

namespace {

// Theorem switch for the sign of the (dL_dg . grad U) div xi volume term;
// the default follows the weak conservation law (minus).
#ifdef NFEM_NOETHER_DIVXI_PLUS
constexpr double divxi_sign = 1.0;
#else
constexpr double divxi_sign = -1.0;
#endif

Vec2 physical_point(const Mesh& m, int tri, const std::array<double, 3>& bary) {
    const auto& T = m.triangles[tri];
    return m.vertices[T.v[0]] * bary[0] + m.vertices[T.v[1]] * bary[1] +
           m.vertices[T.v[2]] * bary[2];
}

// barycentric coordinates, in a given triangle, of the point at parameter t
// along the canonical direction (edge.v[0] -> edge.v[1]) of one of its edges
std::array<double, 3> edge_bary(const Mesh& m, int tri, int le, int v0_global, double t) {
    const auto& T = m.triangles[tri];
    int la = (le + 1) % 3, lb = (le + 2) % 3;
    std::array<double, 3> bary{0.0, 0.0, 0.0};
    if (T.v[la] == v0_global) {
        bary[la] = 1.0 - t;
        bary[lb] = t;
    } else {
        bary[la] = t;
        bary[lb] = 1.0 - t;
    }
    return bary;
}

struct SymmetryEval {
    Vec2 xi;
    Mat2 xi_jac;
    Vec2 xi_du;
    double phi;
    Vec2 phi_dx;
    double phi_du;
};

SymmetryEval eval_symmetry(const Symmetry& sym, Vec2 x, double u) {
    return {sym.xi(x, u),     sym.xi_jacobian(x, u), sym.xi_du(x, u),
            sym.phi(x, u),    sym.phi_dx(x, u),      sym.phi_du(x, u)};
}

} // namespace

Symmetry rotation_symmetry() {
    Symmetry s;
    s.xi = [](Vec2 x, double) { return Vec2{-x.y, x.x}; };
    s.xi_jacobian = [](Vec2, double) { return Mat2{0.0, -1.0, 1.0, 0.0}; };
    s.xi_du = [](Vec2, double) { return Vec2{0.0, 0.0}; };
    s.phi = [](Vec2, double) { return 0.0; };
    s.phi_dx = [](Vec2, double) { return Vec2{0.0, 0.0}; };
    s.phi_du = [](Vec2, double) { return 0.0; };
    s.depends_on_u = false;
    return s;
}

Symmetry translation_u_symmetry() {
    Symmetry s;
    s.xi = [](Vec2, double) { return Vec2{0.0, 0.0}; };
    s.xi_jacobian = [](Vec2, double) { return Mat2{}; };
    s.xi_du = [](Vec2, double) { return Vec2{0.0, 0.0}; };
    s.phi = [](Vec2, double) { return 1.0; };
    s.phi_dx = [](Vec2, double) { return Vec2{0.0, 0.0}; };
    s.phi_du = [](Vec2, double) { return 0.0; };
    s.depends_on_u = false;
    return s;
}

double characteristic(const Symmetry& sym, Vec2 x, double u, Vec2 g) {
    return sym.phi(x, u) - dot(sym.xi(x, u), g);
}

Vec2 flux_C(const LagrangianModel& model, const Symmetry& sym, Vec2 x, double u, Vec2 g) {
    LagrangianState st = model.derivatives(x, u, g);
    double Q = sym.phi(x, u) - dot(sym.xi(x, u), g);
    return st.L * sym.xi(x, u) + Q * st.dL_dg;
}

Vec2 flux_C_rotation_laplace(Vec2 x, double u, Vec2 g, double f_val) {
    double half_sq = 0.5 * (g.x * g.x - g.y * g.y);
    return {x.y * half_sq - x.x * g.x * g.y + x.y * f_val * u,
            x.x * half_sq + x.y * g.x * g.y - x.x * f_val * u};
}

ConservationResidual conservation_residual(const LagrangianModel& model, const Symmetry& sym,
                                           const SmoothField& u, Vec2 x) {
    const double h = 1e-4;
    auto flux_at = [&](Vec2 y) { return flux_C(model, sym, y, u.value(y), u.gradient(y)); };
    // fourth-order centered divergence
    double div = 0.0;
    for (int dim = 0; dim < 2; ++dim) {
        Vec2 e = (dim == 0) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
        double f1 = (dim == 0) ? flux_at(x + 2.0 * h * e).x : flux_at(x + 2.0 * h * e).y;
        double f2 = (dim == 0) ? flux_at(x + h * e).x : flux_at(x + h * e).y;
        double f3 = (dim == 0) ? flux_at(x - h * e).x : flux_at(x - h * e).y;
        double f4 = (dim == 0) ? flux_at(x - 2.0 * h * e).x : flux_at(x - 2.0 * h * e).y;
        div += (-f1 + 8.0 * f2 - 8.0 * f3 + f4) / (12.0 * h);
    }

    double uv = u.value(x);
    Vec2 g = u.gradient(x);
    Mat2 H = u.hessian(x);
    LagrangianState st = model.derivatives(x, uv, g);
    double divG = trace(st.d2L_dgdx) + dot(st.d2L_dgdu, g) + contract(st.d2L_dgdg, H);
    double EL = -divG + st.dL_du;
    double Q = sym.phi(x, uv) - dot(sym.xi(x, uv), g);
    return {div, Q * EL};
}

double div_flux_C(const LagrangianModel& model, const Symmetry& sym, Vec2 x,
                  const FieldEval& u) {
    LagrangianState st = model.derivatives(x, u.value, u.grad);
    SymmetryEval se = eval_symmetry(sym, x, u.value);
    Vec2 g = u.grad;
    const Mat2& H = u.hess;

    double Q = se.phi - dot(se.xi, g);
    Vec2 gradL = st.dL_dx + st.dL_du * g + H * st.dL_dg;
    double div_xi = trace(se.xi_jac) + dot(se.xi_du, g);
    double div_G = trace(st.d2L_dgdx) + dot(st.d2L_dgdu, g) + contract(st.d2L_dgdg, H);
    Vec2 gradQ = se.phi_dx + se.phi_du * g - transpose(se.xi_jac) * g -
                 dot(se.xi_du, g) * g - H * se.xi;
    return dot(gradL, se.xi) + st.L * div_xi + div_G * Q + dot(st.dL_dg, gradQ);
}

double discrete_noether(const FunctionSpace& space, const LagrangianModel& model,
                        const Symmetry& sym, const FEFunction& U) {
    const Mesh& m = space.mesh();
    int k = space.degree();
    const TriangleRule& vrule = triangle_rule(std::min(2 * k + 3, 12));
    const EdgeRule& erule = edge_rule(std::min(2 * k + 2, 12));

    FEFunction Pphi = l2_project(
        space, std::function<double(int, const std::array<double, 3>&, Vec2)>(
                   [&](int tri, const std::array<double, 3>& bary, Vec2 x) {
                       return sym.phi(x, U.eval(tri, bary).value);
                   }));

    KahanSum N;
    for (int t = 0; t < m.n_triangles(); ++t) {
        double two_area = 2.0 * m.signed_area(t);
        for (size_t q = 0; q < vrule.points.size(); ++q) {
            const auto& bary = vrule.points[q];
            double w = vrule.weights[q] * two_area;
            Vec2 x = physical_point(m, t, bary);
            FieldEval fe = U.eval(t, bary);
            LagrangianState st = model.derivatives(x, fe.value, fe.grad);
            SymmetryEval se = eval_symmetry(sym, x, fe.value);

            double div_G = trace(st.d2L_dgdx) + dot(st.d2L_dgdu, fe.grad) +
                           contract(st.d2L_dgdg, fe.hess);
            Vec2 gradL = st.dL_dx + st.dL_du * fe.grad + fe.hess * st.dL_dg;
            double div_xi = trace(se.xi_jac) + dot(se.xi_du, fe.grad);
            double pphi = Pphi.eval(t, bary).value;

            double integrand = (-div_G + st.dL_du) * pphi + dot(gradL, se.xi) +
                               st.L * div_xi +
                               divxi_sign * dot(st.dL_dg, fe.grad) * div_xi;
            N.add(w * integrand);
        }
    }

    for (size_t e = 0; e < m.interior_edges.size(); ++e) {
        const auto& ie = m.interior_edges[e];
        EdgeGeometry geo = m.interior_edge_geometry(static_cast<int>(e));
        for (size_t q = 0; q < erule.points.size(); ++q) {
            double t = erule.points[q];
            double w = erule.weights[q] * geo.length;
            auto b1 = edge_bary(m, ie.tri_left, ie.le_left, ie.v[0], t);
            auto b2 = edge_bary(m, ie.tri_right, ie.le_right, ie.v[0], t);
            Vec2 x = physical_point(m, ie.tri_left, b1);
            FieldEval f1 = U.eval(ie.tri_left, b1);
            FieldEval f2 = U.eval(ie.tri_right, b2);
            LagrangianState s1 = model.derivatives(x, f1.value, f1.grad);
            LagrangianState s2 = model.derivatives(x, f2.value, f2.grad);
            double jump_G = dot(s1.dL_dg - s2.dL_dg, geo.normal1);
            double avg_pphi =
                0.5 * (Pphi.eval(ie.tri_left, b1).value + Pphi.eval(ie.tri_right, b2).value);
            Vec2 avg_xi = sym.xi(x, 0.5 * (f1.value + f2.value));
            N.add(w * (jump_G * avg_pphi + (s1.L - s2.L) * dot(geo.normal1, avg_xi)));
        }
    }
    return N.value();
}

namespace {

double weak_law_core(
    const FunctionSpace& space, const LagrangianModel& model, const Symmetry& sym,
    const std::function<void(int, const std::array<double, 3>&, Vec2, FieldEval&)>& eval_piece,
    const std::vector<int>& piece_of_triangle) {
    const Mesh& m = space.mesh();
    int k = space.degree();
    const TriangleRule& vrule = triangle_rule(std::min(2 * k + 3, 12));
    const EdgeRule& erule = edge_rule(std::min(2 * k + 2, 12));

    KahanSum R;
    for (int t = 0; t < m.n_triangles(); ++t) {
        double two_area = 2.0 * m.signed_area(t);
        for (size_t q = 0; q < vrule.points.size(); ++q) {
            const auto& bary = vrule.points[q];
            double w = vrule.weights[q] * two_area;
            Vec2 x = physical_point(m, t, bary);
            FieldEval fe;
            eval_piece(t, bary, x, fe);
            LagrangianState st = model.derivatives(x, fe.value, fe.grad);
            SymmetryEval se = eval_symmetry(sym, x, fe.value);

            double phi_eff = se.phi;
            Vec2 grad_phi_eff = se.phi_dx + se.phi_du * fe.grad;
            Vec2 gradL = st.dL_dx + st.dL_du * fe.grad + fe.hess * st.dL_dg;
            double div_xi = trace(se.xi_jac) + dot(se.xi_du, fe.grad);

            double integrand = dot(st.dL_dg, grad_phi_eff) + st.dL_du * phi_eff +
                               dot(gradL, se.xi) + st.L * div_xi -
                               dot(st.dL_dg, fe.grad) * div_xi;
            R.add(w * integrand);
        }
    }

    for (size_t e = 0; e < m.interior_edges.size(); ++e) {
        const auto& ie = m.interior_edges[e];
        if (piece_of_triangle[ie.tri_left] == piece_of_triangle[ie.tri_right]) continue;
        EdgeGeometry geo = m.interior_edge_geometry(static_cast<int>(e));
        for (size_t q = 0; q < erule.points.size(); ++q) {
            double t = erule.points[q];
            double w = erule.weights[q] * geo.length;
            auto b1 = edge_bary(m, ie.tri_left, ie.le_left, ie.v[0], t);
            auto b2 = edge_bary(m, ie.tri_right, ie.le_right, ie.v[0], t);
            Vec2 x = physical_point(m, ie.tri_left, b1);
            FieldEval f1, f2;
            eval_piece(ie.tri_left, b1, x, f1);
            eval_piece(ie.tri_right, b2, x, f2);
            LagrangianState s1 = model.derivatives(x, f1.value, f1.grad);
            LagrangianState s2 = model.derivatives(x, f2.value, f2.grad);
            double jump_G = dot(s1.dL_dg - s2.dL_dg, geo.normal1);
            double avg_phi = 0.5 * (sym.phi(x, f1.value) + sym.phi(x, f2.value));
            Vec2 avg_xi = sym.xi(x, 0.5 * (f1.value + f2.value));
            R.add(w * (jump_G * avg_phi + (s1.L - s2.L) * dot(geo.normal1, avg_xi)));
        }
    }
    return R.value();
}

} // namespace

double weak_law_residual(const FunctionSpace& space, const LagrangianModel& model,
                         const Symmetry& sym, const std::vector<SmoothField>& piece_fields,
                         const std::vector<int>& piece_of_triangle) {
    if (piece_of_triangle.size() != static_cast<size_t>(space.mesh().n_triangles()))
        throw std::invalid_argument("weak_law_residual: piece map size mismatch");
    for (int p : piece_of_triangle)
        if (p < 0 || p >= static_cast<int>(piece_fields.size()))
            throw std::invalid_argument("weak_law_residual: piece index out of range");
    auto eval_piece = [&](int tri, const std::array<double, 3>&, Vec2 x, FieldEval& out) {
        const SmoothField& f = piece_fields[piece_of_triangle[tri]];
        out.value = f.value(x);
        out.grad = f.gradient(x);
        out.hess = f.hessian(x);
    };
    return weak_law_core(space, model, sym, eval_piece, piece_of_triangle);
}

double weak_law_residual(const FunctionSpace& space, const LagrangianModel& model,
                         const Symmetry& sym, const FEFunction& U) {
    std::vector<int> piece(space.mesh().n_triangles());
    for (size_t i = 0; i < piece.size(); ++i) piece[i] = static_cast<int>(i);
    auto eval_piece = [&](int tri, const std::array<double, 3>& bary, Vec2, FieldEval& out) {
        out = U.eval(tri, bary);
    };
    return weak_law_core(space, model, sym, eval_piece, piece);
}

std::string NoetherReport::to_json() const {
    nlohmann::json j;
    j["N"] = N_value;
    j["E"] = E_total;
    j["elements"] = element_indicators;
    j["edges"] = edge_indicators;
    return j.dump();
}

NoetherReport estimator(const FunctionSpace& space, const LagrangianModel& model,
                        const Symmetry& sym, const FEFunction& U) {
    const Mesh& m = space.mesh();
    int k = space.degree();
    const TriangleRule& vrule = triangle_rule(std::min(2 * k + 4, 12));
    const EdgeRule& erule = edge_rule(std::min(2 * k + 4, 12));

    NoetherReport rep;
    rep.element_indicators.resize(m.n_triangles(), 0.0);
    rep.edge_indicators.resize(m.interior_edges.size(), 0.0);

    for (int t = 0; t < m.n_triangles(); ++t) {
        double two_area = 2.0 * m.signed_area(t);
        double acc = 0.0;
        for (size_t q = 0; q < vrule.points.size(); ++q) {
            const auto& bary = vrule.points[q];
            Vec2 x = physical_point(m, t, bary);
            FieldEval fe = U.eval(t, bary);
            double d = div_flux_C(model, sym, x, fe);
            acc += vrule.weights[q] * two_area * d * d;
        }
        rep.element_indicators[t] = std::sqrt(std::max(acc, 0.0));
    }

    for (size_t e = 0; e < m.interior_edges.size(); ++e) {
        const auto& ie = m.interior_edges[e];
        EdgeGeometry geo = m.interior_edge_geometry(static_cast<int>(e));
        double acc = 0.0;
        for (size_t q = 0; q < erule.points.size(); ++q) {
            double t = erule.points[q];
            auto b1 = edge_bary(m, ie.tri_left, ie.le_left, ie.v[0], t);
            auto b2 = edge_bary(m, ie.tri_right, ie.le_right, ie.v[0], t);
            Vec2 x = physical_point(m, ie.tri_left, b1);
            FieldEval f1 = U.eval(ie.tri_left, b1);
            FieldEval f2 = U.eval(ie.tri_right, b2);
            Vec2 C1 = flux_C(model, sym, x, f1.value, f1.grad);
            Vec2 C2 = flux_C(model, sym, x, f2.value, f2.grad);
            double jump = dot(C1 - C2, geo.normal1);
            acc += erule.weights[q] * geo.length * jump * jump;
        }
        // h_e^{1/2} ||[[C]]||_{L2(e)}: the edge weight that makes the total a
        // bound for ||div C||_{H^-1} uniformly in the mesh size
        rep.edge_indicators[e] = std::sqrt(std::max(geo.length * acc, 0.0));
    }

    double elem_sq = 0.0, edge_sq = 0.0;
    for (double v : rep.element_indicators) elem_sq += v * v;
    for (double v : rep.edge_indicators) edge_sq += v * v;
    rep.E_total = std::sqrt(elem_sq) + std::sqrt(edge_sq);
    rep.N_value = discrete_noether(space, model, sym, U);
    return rep;
}

} // namespace nfem
