#pragma once

#include <array>
#include <vector>

namespace nfem {

// Quadrature on the reference triangle {x,y >= 0, x + y <= 1}, points stored
// as barycentric triples, weights summing to the reference measure 1/2.
struct TriangleRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
    int exact_degree = 0;
};

// Quadrature on the reference edge [0,1], weights summing to 1.
struct EdgeRule {
    std::vector<double> points;
    std::vector<double> weights;
    int exact_degree = 0;
};

// Rule exact for all polynomials of total degree <= degree, 1 <= degree <= 12.
// All weights positive; the point set is invariant under the vertex
// permutation group so that mirrored meshes integrate to mirrored values.
// Throws std::invalid_argument outside the supported range.
const TriangleRule& triangle_rule(int degree);

// Gauss-Legendre on [0,1], exact to at least `degree`, 1 <= degree <= 12.
const EdgeRule& edge_rule(int degree);

// Gauss-Legendre nodes/weights on [0,1] (weights sum to 1).
void gauss_legendre_01(int n, std::vector<double>& points, std::vector<double>& weights);

} // namespace nfem
