#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nfem/benchmarks.hpp"
#include "nfem/lagrangian.hpp"
#include "nfem/mesh.hpp"

#include <cmath>
#include <memory>
#include <random>

using namespace nfem;

TEST_CASE("p-laplacian derivative reference values") {
    ScalarField zero = ScalarField::zero();
    {
        PLaplacian model(2.0, zero);
        LagrangianState st = model.derivatives({0.3, -0.2}, 0.7, {1.0, 0.0});
        CHECK(norm(st.dL_dg - Vec2{1.0, 0.0}) <= 1e-15);
        CHECK(std::abs(st.d2L_dgdg(0, 0) - 1.0) <= 1e-15);
        CHECK(std::abs(st.d2L_dgdg(1, 1) - 1.0) <= 1e-15);
        CHECK(std::abs(st.d2L_dgdg(0, 1)) <= 1e-15);
    }
    {
        PLaplacian model(4.0, zero);
        LagrangianState st = model.derivatives({0.0, 0.0}, 0.0, {1.0, 1.0});
        CHECK(norm(st.dL_dg - Vec2{2.0, 2.0}) <= 1e-14);
        CHECK(st.L == doctest::Approx(1.0).epsilon(1e-14)); // (1/4) * (|g|^2)^2 = 1
    }
    {
        PLaplacian model(3.0, zero);
        LagrangianState st = model.derivatives({0.0, 0.0}, 0.0, {0.0, 0.0});
        CHECK(norm(st.dL_dg) == 0.0);
        CHECK(st.L == 0.0);
    }
    {
        PLaplacian model(1.5, zero);
        CHECK_THROWS_AS(model.derivatives({0.0, 0.0}, 0.0, {0.0, 0.0}), std::domain_error);
    }
    CHECK_THROWS_AS(PLaplacian(1.0, ScalarField::zero()), std::invalid_argument);
}

TEST_CASE("derivatives agree with finite differences at random states") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ScalarField f = {[](Vec2 x) { return std::sin(x.x + 2.0 * x.y); },
                     [](Vec2 x) {
                         double c = std::cos(x.x + 2.0 * x.y);
                         return Vec2{c, 2.0 * c};
                     }};
    const double h = 1e-6;
    for (double p : {2.0, 2.5, 3.0, 4.0, 5.0}) {
        PLaplacian model(p, f);
        for (int trial = 0; trial < 40; ++trial) {
            Vec2 x{u(rng), u(rng)};
            double uv = u(rng);
            Vec2 g{u(rng) + 2.0, u(rng) - 2.0}; // away from the origin in g
            LagrangianState st = model.derivatives(x, uv, g);
            auto L = [&](Vec2 xx, double uu, Vec2 gg) { return model.derivatives(xx, uu, gg).L; };
            double scale = std::max(1.0, std::abs(st.L));

            Vec2 fd_g{(L(x, uv, g + Vec2{h, 0}) - L(x, uv, g - Vec2{h, 0})) / (2 * h),
                      (L(x, uv, g + Vec2{0, h}) - L(x, uv, g - Vec2{0, h})) / (2 * h)};
            CHECK(norm(st.dL_dg - fd_g) / scale <= 1e-6);

            double fd_u = (L(x, uv + h, g) - L(x, uv - h, g)) / (2 * h);
            CHECK(std::abs(st.dL_du - fd_u) / scale <= 1e-6);

            Vec2 fd_x{(L(x + Vec2{h, 0}, uv, g) - L(x - Vec2{h, 0}, uv, g)) / (2 * h),
                      (L(x + Vec2{0, h}, uv, g) - L(x - Vec2{0, h}, uv, g)) / (2 * h)};
            CHECK(norm(st.dL_dx - fd_x) / scale <= 1e-6);

            // d2L_dgdg columns against finite differences of dL_dg
            for (int d = 0; d < 2; ++d) {
                Vec2 e = d == 0 ? Vec2{h, 0.0} : Vec2{0.0, h};
                Vec2 fd2 = (model.derivatives(x, uv, g + e).dL_dg -
                            model.derivatives(x, uv, g - e).dL_dg) /
                           (2 * h);
                Vec2 col{st.d2L_dgdg(0, d), st.d2L_dgdg(1, d)};
                CHECK(norm(col - fd2) / std::max(1.0, norm(col)) <= 1e-6);
            }
            CHECK(std::abs(st.d2L_dgdg(0, 1) - st.d2L_dgdg(1, 0)) <= 1e-14);
        }
    }
}

TEST_CASE("flux Hessian is positive semidefinite for p >= 2") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (double p : {2.0, 3.0, 4.5}) {
        PLaplacian model(p, ScalarField::zero());
        for (int trial = 0; trial < 100; ++trial) {
            Vec2 g{u(rng), u(rng)};
            Mat2 H = model.derivatives({0, 0}, 0.0, g).d2L_dgdg;
            double tr = trace(H);
            double det = H(0, 0) * H(1, 1) - H(0, 1) * H(1, 0);
            double min_eig = 0.5 * (tr - std::sqrt(std::max(tr * tr - 4.0 * det, 0.0)));
            CHECK(min_eig >= -1e-12);
        }
    }
}

TEST_CASE("manufactured source reference values at p = 2") {
    CHECK(manufactured_f(2.0, {0.0, 0.0}) == doctest::Approx(-4.0 * M_PI).epsilon(1e-14));
    double t = 0.25;
    double c = std::cos(M_PI * t), s = std::sin(M_PI * t);
    double expect = -(4.0 * M_PI * c - 4.0 * M_PI * M_PI * t * s);
    CHECK(manufactured_f(2.0, {0.5, 0.0}) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("manufactured source agrees with the finite-difference flux divergence") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double h = 1e-4;
    for (double p : {2.0, 2.5, 3.0, 4.0, 5.0}) {
        auto flux = [p](Vec2 y) {
            Vec2 g = (2.0 * M_PI * std::cos(M_PI * norm2(y))) * y;
            double a = (p == 2.0) ? 1.0 : std::pow(norm2(g), 0.5 * p - 1.0);
            return a * g;
        };
        int accepted = 0;
        while (accepted < 100) {
            Vec2 x{u(rng), u(rng)};
            if (norm2(x) >= 0.96) continue;
            Vec2 g = (2.0 * M_PI * std::cos(M_PI * norm2(x))) * x;
            if (norm(g) <= 0.1) continue;
            if (std::abs(std::cos(M_PI * norm2(x))) < 0.05) continue;
            ++accepted;
            double div = 0.0;
            for (int dim = 0; dim < 2; ++dim) {
                Vec2 e = dim == 0 ? Vec2{h, 0.0} : Vec2{0.0, h};
                auto comp = [&](Vec2 y) { return dim == 0 ? flux(y).x : flux(y).y; };
                div += (-comp(x + 2.0 * e) + 8.0 * comp(x + e) - 8.0 * comp(x - e) +
                        comp(x - 2.0 * e)) /
                       (12.0 * h);
            }
            double fv = manufactured_f(p, x);
            CHECK(std::abs(fv + div) <= 1e-6 * std::max(1.0, std::abs(fv)));
        }
    }
}

TEST_CASE("manufactured source gradient matches finite differences") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    const double h = 1e-5;
    for (double p : {2.0, 3.0, 4.0, 5.0}) {
        int accepted = 0;
        while (accepted < 50) {
            Vec2 x{u(rng), u(rng)};
            double t = norm2(x);
            if (t < 0.01 || std::abs(std::cos(M_PI * t)) < 0.1) continue;
            ++accepted;
            Vec2 gf = manufactured_f_gradient(p, x);
            for (int dim = 0; dim < 2; ++dim) {
                Vec2 e = dim == 0 ? Vec2{h, 0.0} : Vec2{0.0, h};
                double fd = (-manufactured_f(p, x + 2.0 * e) + 8.0 * manufactured_f(p, x + e) -
                             8.0 * manufactured_f(p, x - e) + manufactured_f(p, x - 2.0 * e)) /
                            (12.0 * h);
                double got = dim == 0 ? gf.x : gf.y;
                CHECK(std::abs(got - fd) <= 1e-5 * std::max(100.0, std::abs(fd)));
            }
        }
    }
}

TEST_CASE("manufactured gradient is radial so it is orthogonal to rotations") {
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Vec2 x{u(rng), u(rng)};
        Vec2 gf = manufactured_f_gradient(3.0, x);
        CHECK(std::abs(cross(gf, x)) <= 1e-12 * std::max(1.0, norm(gf)));
    }
}

TEST_CASE("total gradient of L") {
    auto mesh = std::make_shared<Mesh>(build_square_mesh(2, 61, 0.1));
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(0.05, 0.3);

    // k=1 with constant source: the Hessian term vanishes
    {
        FunctionSpace space(mesh, 1, false);
        PLaplacian model(2.0, ScalarField::constant(2.0));
        FEFunction U = interpolate(space, [](Vec2 x) { return 0.5 * x.x - x.y; });
        std::array<double, 3> bary{0.4, 0.3, 0.3};
        for (int t = 0; t < mesh->n_triangles(); t += 3) {
            Vec2 got = total_gradient_L(model, U, t, bary);
            FieldEval fe = U.eval(t, bary);
            Vec2 expect = -2.0 * fe.grad; // dL_du * grad U with f = 2 and grad f = 0
            CHECK(norm(got - expect) <= 1e-13);
        }
    }
    // p=2, f=0, U = x1^2 interpolated on P2: total gradient = (4 x1, 0)
    {
        FunctionSpace space(mesh, 2, false);
        PLaplacian model(2.0, ScalarField::zero());
        FEFunction U = interpolate(space, [](Vec2 x) { return x.x * x.x; });
        for (int t = 0; t < mesh->n_triangles(); t += 2) {
            double a = u(rng), b = u(rng);
            std::array<double, 3> bary{1.0 - a - b, a, b};
            const auto& T = mesh->triangles[t];
            Vec2 x = mesh->vertices[T.v[0]] * bary[0] + mesh->vertices[T.v[1]] * bary[1] +
                     mesh->vertices[T.v[2]] * bary[2];
            Vec2 got = total_gradient_L(model, U, t, bary);
            CHECK(norm(got - Vec2{4.0 * x.x, 0.0}) <= 1e-9);
        }
    }
    // zero field, zero source
    {
        FunctionSpace space(mesh, 1);
        PLaplacian model(3.0, ScalarField::zero());
        FEFunction U(space);
        Vec2 got = total_gradient_L(model, U, 0, {0.3, 0.3, 0.4});
        CHECK(norm(got) == 0.0);
    }
}

TEST_CASE("benchmark exact fields satisfy their own calculus") {
    // gradient/hessian consistency of the packaged exact solutions
    std::mt19937_64 rng(67);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    const double h = 1e-5;
    for (const Benchmark& b : {disk_benchmark(3.0), square_benchmark()}) {
        for (int trial = 0; trial < 30; ++trial) {
            Vec2 x{u(rng), u(rng)};
            Vec2 g = b.exact.gradient(x);
            Vec2 fd{(b.exact.value(x + Vec2{h, 0}) - b.exact.value(x - Vec2{h, 0})) / (2 * h),
                    (b.exact.value(x + Vec2{0, h}) - b.exact.value(x - Vec2{0, h})) / (2 * h)};
            CHECK(norm(g - fd) <= 1e-8 * std::max(1.0, norm(g)));
            Mat2 H = b.exact.hessian(x);
            Vec2 fdH0 = (b.exact.gradient(x + Vec2{h, 0}) - b.exact.gradient(x - Vec2{h, 0})) /
                        (2 * h);
            CHECK(std::abs(H(0, 0) - fdH0.x) <= 1e-6 * std::max(1.0, std::abs(H(0, 0))));
            CHECK(std::abs(H(1, 0) - fdH0.y) <= 1e-6 * std::max(1.0, std::abs(H(1, 0))));
        }
    }
}
