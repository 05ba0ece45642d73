#pragma once

#include "nfem/mesh.hpp"
#include "nfem/noether.hpp"
#include "nfem/solver.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace nfem {

struct AdaptConfig {
    double theta = 0.5;          // maximum-strategy marking fraction
    double target_E = 0.0;
    int max_dofs = std::numeric_limits<int>::max();
    int max_rounds = 40;
    NewtonConfig newton;
};

struct AdaptRound {
    int round = 0;
    int dofs = 0;
    double E = 0.0;
    double N = 0.0;
    double lp_err = 0.0;  // 0 when no exact solution is supplied
    double w1p_err = 0.0;
    double h_max = 0.0;
    int n_triangles = 0;
};

struct AdaptTrace {
    std::vector<AdaptRound> rounds;
    bool reached_target = false;
    bool solver_failed = false;
    Mesh final_mesh;
    std::string to_csv() const;
};

struct AdaptProblem {
    Mesh initial_mesh;
    int degree = 1;
    double p = 2.0;
    ScalarField f;
    Symmetry sym;
    // Dirichlet data interpolated at boundary nodes (empty = homogeneous)
    std::function<double(Vec2)> boundary_values;
    // when provided, the trace records L^p / W^{1,p} errors against it
    std::optional<SmoothField> exact;
};

// edge indicators split half/half onto their two incident triangles
std::vector<double> combine_indicators(const Mesh& mesh, const NoetherReport& report);

// maximum strategy: mark i iff indicator[i] >= theta * max indicator;
// all-zero indicators produce an empty set
std::vector<int> mark_maximum(const std::vector<double>& indicators, double theta);

// SOLVE -> ESTIMATE -> MARK -> REFINE until E <= target_E or limits hit
AdaptTrace adapt_loop(const AdaptProblem& problem, const AdaptConfig& config);

} // namespace nfem
