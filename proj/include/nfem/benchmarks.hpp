#pragma once

#include "nfem/lagrangian.hpp"

namespace nfem {

struct Benchmark {
    double p = 2.0;
    ScalarField f;
    SmoothField exact;
    // Dirichlet values interpolated at boundary nodes; null for homogeneous
    std::function<double(Vec2)> boundary_values;
};

// u = sin(pi |x|^2) on the unit disk, f manufactured for the p-Laplacian,
// homogeneous boundary values
Benchmark disk_benchmark(double p);

// u = exp(-10 |x|^2) on [-1,1]^2 for the 2-Laplacian; the (small) nonzero
// trace is imposed through a nodal boundary lift
Benchmark square_benchmark();

} // namespace nfem
