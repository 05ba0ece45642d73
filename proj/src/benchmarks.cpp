#include "nfem/benchmarks.hpp"

#include <cmath>

namespace nfem {

Benchmark disk_benchmark(double p) {
    Benchmark b;
    b.p = p;
    b.f = {[p](Vec2 x) { return manufactured_f(p, x); },
           [p](Vec2 x) { return manufactured_f_gradient(p, x); }};
    b.exact = {
        [](Vec2 x) { return std::sin(M_PI * norm2(x)); },
        [](Vec2 x) { return (2.0 * M_PI * std::cos(M_PI * norm2(x))) * x; },
        [](Vec2 x) {
            double t = norm2(x);
            double c = std::cos(M_PI * t), s = std::sin(M_PI * t);
            return 2.0 * M_PI * c * Mat2::identity() -
                   (4.0 * M_PI * M_PI * s) * Mat2::outer(x, x);
        },
    };
    b.boundary_values = nullptr;
    return b;
}

Benchmark square_benchmark() {
    Benchmark b;
    b.p = 2.0;
    // u = exp(-10 t), t = |x|^2: -Lap u = (40 - 400 t) e^{-10 t}
    b.f = {[](Vec2 x) {
               double t = norm2(x);
               return (40.0 - 400.0 * t) * std::exp(-10.0 * t);
           },
           [](Vec2 x) {
               double t = norm2(x);
               return (2.0 * (4000.0 * t - 800.0) * std::exp(-10.0 * t)) * x;
           }};
    b.exact = {
        [](Vec2 x) { return std::exp(-10.0 * norm2(x)); },
        [](Vec2 x) { return (-20.0 * std::exp(-10.0 * norm2(x))) * x; },
        [](Vec2 x) {
            double e = std::exp(-10.0 * norm2(x));
            return e * (400.0 * Mat2::outer(x, x) - 20.0 * Mat2::identity());
        },
    };
    b.boundary_values = [](Vec2 x) { return std::exp(-10.0 * norm2(x)); };
    return b;
}

} // namespace nfem
