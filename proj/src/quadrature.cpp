#include "nfem/quadrature.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace nfem {

void gauss_legendre_01(int n, std::vector<double>& points, std::vector<double>& weights) {
    points.resize(n);
    weights.resize(n);
    // Newton iteration on Legendre P_n over [-1,1], Chebyshev initial guess.
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        // recompute dp at the converged root
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 0.5 * w;
    }
}

namespace {

void add_orbit3(TriangleRule& r, double a, double w) {
    // permutations of (1-2a, a, a); w is the weight of each point
    double b = 1.0 - 2.0 * a;
    r.points.push_back({b, a, a});
    r.points.push_back({a, b, a});
    r.points.push_back({a, a, b});
    for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

void add_orbit6(TriangleRule& r, double a, double b, double w) {
    double c = 1.0 - a - b;
    r.points.push_back({a, b, c});
    r.points.push_back({a, c, b});
    r.points.push_back({b, a, c});
    r.points.push_back({b, c, a});
    r.points.push_back({c, a, b});
    r.points.push_back({c, b, a});
    for (int i = 0; i < 6; ++i) r.weights.push_back(w);
}

TriangleRule centroid_rule() {
    TriangleRule r;
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(0.5);
    r.exact_degree = 1;
    return r;
}

TriangleRule three_point_rule() {
    TriangleRule r;
    add_orbit3(r, 1.0 / 6.0, 1.0 / 6.0);
    r.exact_degree = 2;
    return r;
}

TriangleRule dunavant4() {
    TriangleRule r;
    add_orbit3(r, 0.445948490915965, 0.111690794839005);
    add_orbit3(r, 0.091576213509771, 0.054975871827661);
    r.exact_degree = 4;
    return r;
}

TriangleRule dunavant5() {
    TriangleRule r;
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(9.0 / 80.0);
    add_orbit3(r, 0.470142064105115, 0.066197076394253);
    add_orbit3(r, 0.101286507323456, 0.062969590272414);
    r.exact_degree = 5;
    return r;
}

TriangleRule dunavant6() {
    TriangleRule r;
    add_orbit3(r, 0.063089014491502, 0.025422453185103);
    add_orbit3(r, 0.249286745170910, 0.058393137863189);
    add_orbit6(r, 0.310352451033785, 0.053145049844816, 0.041425537809187);
    r.exact_degree = 6;
    return r;
}

// Conical-product Gauss rule symmetrized over the vertex permutation group.
// Positive weights and exactness hold by construction for any degree.
TriangleRule symmetrized_conical(int degree) {
    int n = (degree + 3) / 2; // Gauss-Legendre exact to 2n-1 >= degree+1
    std::vector<double> gp, gw;
    gauss_legendre_01(n, gp, gw);

    TriangleRule r;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double eta = gp[j];
            double x = gp[i] * (1.0 - eta);
            double y = eta;
            double w = gw[i] * gw[j] * (1.0 - eta);
            add_orbit6(r, 1.0 - x - y, x, w / 6.0);
        }
    }
    r.exact_degree = degree;
    return r;
}

} // namespace

const TriangleRule& triangle_rule(int degree) {
    if (degree < 1 || degree > 12)
        throw std::invalid_argument("triangle_rule: degree must be in [1,12]");
    static std::map<int, TriangleRule> cache;
    auto it = cache.find(degree);
    if (it != cache.end()) return it->second;

    TriangleRule r;
    switch (degree) {
    case 1: r = centroid_rule(); break;
    case 2: r = three_point_rule(); break;
    case 3:
    case 4: r = dunavant4(); break;
    case 5: r = dunavant5(); break;
    case 6: r = dunavant6(); break;
    default: r = symmetrized_conical(degree); break;
    }
    return cache.emplace(degree, std::move(r)).first->second;
}

const EdgeRule& edge_rule(int degree) {
    if (degree < 1 || degree > 12)
        throw std::invalid_argument("edge_rule: degree must be in [1,12]");
    static std::map<int, EdgeRule> cache;
    auto it = cache.find(degree);
    if (it != cache.end()) return it->second;

    EdgeRule r;
    int n = degree / 2 + 1; // exact to 2n-1 >= degree
    gauss_legendre_01(n, r.points, r.weights);
    r.exact_degree = 2 * n - 1;
    return cache.emplace(degree, std::move(r)).first->second;
}

} // namespace nfem
