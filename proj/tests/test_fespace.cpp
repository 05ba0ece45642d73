#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nfem/benchmarks.hpp"
#include "nfem/fespace.hpp"
#include "nfem/quadrature.hpp"
#include "nfem/solver.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <random>

using namespace nfem;

namespace {

std::array<double, 3> random_bary(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double a = u(rng), b = u(rng);
    if (a + b > 1.0) {
        a = 1.0 - a;
        b = 1.0 - b;
    }
    return {1.0 - a - b, a, b};
}

Vec2 point_of(const Mesh& m, int t, const std::array<double, 3>& bary) {
    const auto& T = m.triangles[t];
    return m.vertices[T.v[0]] * bary[0] + m.vertices[T.v[1]] * bary[1] +
           m.vertices[T.v[2]] * bary[2];
}

} // namespace

TEST_CASE("partition of unity and vanishing gradient sum") {
    std::mt19937_64 rng(3);
    auto mesh = std::make_shared<Mesh>(build_square_mesh(3, 5, 0.2));
    for (int k = 1; k <= 3; ++k) {
        FunctionSpace space(mesh, k, false);
        ElementBasis eb;
        for (int trial = 0; trial < 30; ++trial) {
            int t = static_cast<int>(rng() % mesh->n_triangles());
            auto bary = random_bary(rng);
            space.eval_basis(t, bary, eb);
            double s = 0.0;
            Vec2 g{0.0, 0.0};
            for (int l = 0; l < eb.n; ++l) {
                s += eb.value[l];
                g += eb.grad[l];
            }
            CHECK(std::abs(s - 1.0) <= 1e-13);
            CHECK(norm(g) <= 1e-12 / mesh->diameter(t));
        }
    }
}

TEST_CASE("nodal duality basis_i(node_j) = delta_ij") {
    auto mesh = std::make_shared<Mesh>(build_square_mesh(2, 9, 0.15));
    for (int k = 1; k <= 3; ++k) {
        FunctionSpace space(mesh, k, false);
        ElementBasis eb;
        for (int t = 0; t < mesh->n_triangles(); ++t) {
            for (int j = 0; j < space.nodes_per_cell(); ++j) {
                auto bary = barycentric(*mesh, t, space.node_position(space.cell_node(t, j)));
                space.eval_basis(t, bary, eb);
                for (int i = 0; i < space.nodes_per_cell(); ++i)
                    CHECK(std::abs(eb.value[i] - (i == j ? 1.0 : 0.0)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("interpolants reproduce polynomials with derivatives") {
    std::mt19937_64 rng(5);
    auto mesh = std::make_shared<Mesh>(build_square_mesh(3, 21, 0.2));

    // constant on an unconstrained space
    {
        FunctionSpace space(mesh, 2, false);
        FEFunction U = interpolate(space, [](Vec2) { return 1.0; });
        for (int trial = 0; trial < 20; ++trial) {
            int t = static_cast<int>(rng() % mesh->n_triangles());
            FieldEval fe = U.eval(t, random_bary(rng));
            CHECK(fe.value == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(norm(fe.grad) <= 1e-12);
        }
    }
    // k=1 reproduces x1 exactly
    {
        FunctionSpace space(mesh, 1, false);
        FEFunction U = interpolate(space, [](Vec2 x) { return x.x; });
        for (int trial = 0; trial < 20; ++trial) {
            int t = static_cast<int>(rng() % mesh->n_triangles());
            FieldEval fe = U.eval(t, random_bary(rng));
            CHECK(norm(fe.grad - Vec2{1.0, 0.0}) <= 1e-12);
            CHECK(std::abs(fe.hess(0, 0)) + std::abs(fe.hess(1, 1)) <= 1e-12);
        }
    }
    // k=2 reproduces x1^2 with the right Hessian
    {
        FunctionSpace space(mesh, 2, false);
        FEFunction U = interpolate(space, [](Vec2 x) { return x.x * x.x; });
        for (int trial = 0; trial < 20; ++trial) {
            int t = static_cast<int>(rng() % mesh->n_triangles());
            auto bary = random_bary(rng);
            Vec2 x = point_of(*mesh, t, bary);
            FieldEval fe = U.eval(t, bary);
            CHECK(fe.value == doctest::Approx(x.x * x.x).epsilon(1e-12));
            CHECK(std::abs(fe.hess(0, 0) - 2.0) <= 1e-10);
            CHECK(std::abs(fe.hess(0, 1)) <= 1e-10);
            CHECK(std::abs(fe.hess(1, 1)) <= 1e-10);
        }
    }
    // k=3 reproduces a full cubic
    {
        FunctionSpace space(mesh, 3, false);
        auto cubic = [](Vec2 x) { return x.x * x.x * x.x - 2.0 * x.x * x.y * x.y + x.y; };
        FEFunction U = interpolate(space, cubic);
        for (int trial = 0; trial < 20; ++trial) {
            int t = static_cast<int>(rng() % mesh->n_triangles());
            auto bary = random_bary(rng);
            Vec2 x = point_of(*mesh, t, bary);
            CHECK(U.eval(t, bary).value == doctest::Approx(cubic(x)).epsilon(1e-11));
        }
    }
}

TEST_CASE("l2 projection is idempotent on the space") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto mesh = std::make_shared<Mesh>(build_square_mesh(4, 31, 0.2));
    for (int k = 1; k <= 2; ++k) {
        FunctionSpace space(mesh, k);
        FEFunction V(space);
        std::vector<double> c(space.dim());
        for (auto& v : c) v = u(rng);
        V.set_interior_coefficients(c);
        FEFunction PV = l2_project(
            space, std::function<double(int, const std::array<double, 3>&, Vec2)>(
                       [&](int tri, const std::array<double, 3>& bary, Vec2) {
                           return V.eval(tri, bary).value;
                       }));
        auto pc = PV.interior_coefficients();
        for (size_t i = 0; i < c.size(); ++i) CHECK(std::abs(pc[i] - c[i]) <= 1e-10);
    }
}

TEST_CASE("l2 projection of zero is zero") {
    auto mesh = std::make_shared<Mesh>(build_square_mesh(3, 2, 0.2));
    FunctionSpace space(mesh, 1);
    FEFunction P = l2_project(space, [](Vec2) { return 0.0; });
    for (double v : P.nodal()) CHECK(v == 0.0);
}

TEST_CASE("projection of 1 on the disk: orthogonality residual") {
    auto mesh = std::make_shared<Mesh>(build_disk_mesh(2));
    FunctionSpace space(mesh, 1);
    FEFunction P = l2_project(space, [](Vec2) { return 1.0; });
    // P1 != 1 because of the boundary constraint
    bool differs = false;
    for (int d = 0; d < space.dim(); ++d)
        if (std::abs(P.nodal()[space.dof_to_node(d)] - 1.0) > 1e-6) differs = true;
    CHECK(differs);
    // but (P1 - 1, V) = 0 for every V in the space
    const TriangleRule& rule = triangle_rule(6);
    std::vector<double> r(space.dim(), 0.0);
    ElementBasis eb;
    for (int t = 0; t < mesh->n_triangles(); ++t) {
        double two_area = 2.0 * mesh->signed_area(t);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            space.eval_basis(t, rule.points[q], eb);
            double diff = P.eval(t, rule.points[q]).value - 1.0;
            for (int a = 0; a < space.nodes_per_cell(); ++a) {
                int da = space.node_to_dof(space.cell_node(t, a));
                if (da >= 0) r[da] += rule.weights[q] * two_area * diff * eb.value[a];
            }
        }
    }
    for (double v : r) CHECK(std::abs(v) <= 1e-10);
}

TEST_CASE("error norms vanish when the exact solution lies in the space") {
    auto mesh = std::make_shared<Mesh>(build_square_mesh(3, 13, 0.2));
    FunctionSpace space(mesh, 2, false);
    auto f = [](Vec2 x) { return x.x * x.x - 0.5 * x.x * x.y + x.y; };
    auto gf = [](Vec2 x) { return Vec2{2.0 * x.x - 0.5 * x.y, -0.5 * x.x + 1.0}; };
    FEFunction U = interpolate(space, f);
    ErrorNorms e = error_norms(U, f, gf, 3.0);
    CHECK(e.lp <= 1e-12);
    CHECK(e.w1p_seminorm <= 1e-12);
}

TEST_CASE("single basis function Lp norm against an independent conical rule") {
    auto mesh = std::make_shared<Mesh>(build_square_mesh(2, 17, 0.2));
    FunctionSpace space(mesh, 2);
    REQUIRE(space.dim() > 0);
    FEFunction U(space);
    std::vector<double> c(space.dim(), 0.0);
    c[space.dim() / 2] = 1.0;
    U.set_interior_coefficients(c);
    double p = 2.0;
    ErrorNorms e = error_norms(
        U, [](Vec2) { return 0.0; }, [](Vec2) { return Vec2{0.0, 0.0}; }, p);

    // oracle: plain (non-symmetrized) conical product rule built here
    std::vector<double> gp, gw;
    gauss_legendre_01(8, gp, gw);
    double acc = 0.0;
    for (int t = 0; t < mesh->n_triangles(); ++t) {
        double two_area = 2.0 * mesh->signed_area(t);
        for (size_t i = 0; i < gp.size(); ++i) {
            for (size_t j = 0; j < gp.size(); ++j) {
                double eta = gp[j];
                double xi = gp[i] * (1.0 - eta);
                std::array<double, 3> bary{1.0 - xi - eta, xi, eta};
                double w = gw[i] * gw[j] * (1.0 - eta) * two_area;
                acc += w * std::pow(std::abs(U.eval(t, bary).value), p);
            }
        }
    }
    CHECK(e.lp == doctest::Approx(std::pow(acc, 1.0 / p)).epsilon(1e-12));
}

TEST_CASE("error norm is homogeneous in the residual") {
    auto mesh = std::make_shared<Mesh>(build_square_mesh(2, 19, 0.2));
    FunctionSpace space(mesh, 1);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FEFunction U(space);
    std::vector<double> c(space.dim());
    for (auto& v : c) v = u(rng);
    U.set_interior_coefficients(c);
    FEFunction U3(space);
    std::vector<double> c3 = c;
    for (auto& v : c3) v *= 3.0;
    U3.set_interior_coefficients(c3);
    auto zero = [](Vec2) { return 0.0; };
    auto zero_g = [](Vec2) { return Vec2{0.0, 0.0}; };
    ErrorNorms e1 = error_norms(U, zero, zero_g, 2.5);
    ErrorNorms e3 = error_norms(U3, zero, zero_g, 2.5);
    CHECK(e3.lp == doctest::Approx(3.0 * e1.lp).epsilon(1e-12));
    CHECK(e3.w1p_seminorm == doctest::Approx(3.0 * e1.w1p_seminorm).epsilon(1e-12));
}

TEST_CASE("eoc reproduces reference slopes") {
    auto r1 = eoc({1.12725161, 0.70442091}, {1.0, 0.5});
    CHECK(r1[0] == doctest::Approx(0.678).epsilon(1e-3));
    auto r2 = eoc({3.63060492, 2.98329491}, {1.0, 0.5});
    CHECK(r2[0] == doctest::Approx(0.283).epsilon(2e-3));
    auto r3 = eoc({0.7, 0.7}, {1.0, 0.5});
    CHECK(r3[0] == doctest::Approx(0.0));
    CHECK_THROWS_AS(eoc({1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(eoc({1.0, -1.0}, {1.0, 0.5}), std::domain_error);
    CHECK_THROWS_AS(eoc({1.0, 0.5}, {0.5, 1.0}), std::domain_error);
}

TEST_CASE("disk benchmark W1p EOC between uniform levels is about 1") {
    Benchmark bench = disk_benchmark(2.0);
    NewtonConfig cfg;
    std::vector<double> errs, hs;
    for (int level : {2, 3}) {
        auto mesh = std::make_shared<Mesh>(build_disk_mesh(level));
        FunctionSpace space(mesh, 1);
        FEFunction U0(space);
        NewtonResult sol = solve_p_laplacian(space, 2.0, bench.f, cfg, U0);
        ErrorNorms e = error_norms(sol.U, bench.exact.value, bench.exact.gradient, 2.0);
        errs.push_back(e.w1p_seminorm);
        hs.push_back(mesh->max_diameter());
    }
    double rate = std::log(errs[1] / errs[0]) / std::log(hs[1] / hs[0]);
    CHECK(rate >= 0.8);
    CHECK(rate <= 1.3);
}

TEST_CASE("nodal transfer reproduces the coarse function exactly") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto mesh = std::make_shared<Mesh>(build_square_mesh(3, 37, 0.2));
    for (int k = 1; k <= 3; ++k) {
        FunctionSpace space(mesh, k);
        FEFunction U(space);
        std::vector<double> c(space.dim());
        for (auto& v : c) v = u(rng);
        U.set_interior_coefficients(c);

        RefineResult fine = uniform_refine(*mesh);
        auto fine_mesh = std::make_shared<Mesh>(fine.mesh);
        FunctionSpace fine_space(fine_mesh, k);
        FEFunction V = transfer_nodal(U, fine_space, fine.parent);
        for (int trial = 0; trial < 30; ++trial) {
            int t = static_cast<int>(rng() % fine_mesh->n_triangles());
            auto bary = random_bary(rng);
            Vec2 x = point_of(*fine_mesh, t, bary);
            auto cb = barycentric(*mesh, fine.parent[t], x);
            CHECK(V.eval(t, bary).value ==
                  doctest::Approx(U.eval(fine.parent[t], cb).value).epsilon(1e-11));
        }
    }
}

TEST_CASE("fe function dump round trip") {
    auto mesh = std::make_shared<Mesh>(build_square_mesh(2, 3, 0.2));
    FunctionSpace space(mesh, 2);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FEFunction U(space);
    std::vector<double> c(space.dim());
    for (auto& v : c) v = u(rng);
    U.set_interior_coefficients(c);
    write_fe_function(U, "roundtrip.fef");
    FEFunction V = read_fe_function(space, "roundtrip.fef");
    auto cv = V.interior_coefficients();
    for (size_t i = 0; i < c.size(); ++i) CHECK(cv[i] == c[i]);
    std::remove("roundtrip.fef");
}

TEST_CASE("boundary dofs are eliminated") {
    auto mesh = std::make_shared<Mesh>(build_disk_mesh(1));
    for (int k = 1; k <= 3; ++k) {
        FunctionSpace constrained(mesh, k);
        FunctionSpace free(mesh, k, false);
        int boundary_nodes = 0;
        for (int n = 0; n < free.n_nodes(); ++n)
            if (free.node_on_boundary(n)) ++boundary_nodes;
        CHECK(constrained.dim() == free.n_nodes() - boundary_nodes);
        CHECK(free.dim() == free.n_nodes());
    }
}
