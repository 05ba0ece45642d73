#pragma once

#include "nfem/adapt.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nfem {

struct RunConfig {
    std::string cmd;              // convergence | estimator | adapt | verify
    std::string domain = "disk";  // disk | square
    double p = 3.0;
    int k = 1;
    int levels = 5;
    std::string sym = "rotation"; // rotation | translation-u
    double theta = 0.5;
    double target_e = 0.0;
    std::uint64_t seed = 1;
    std::string out;
    double newton_tol = 1e-10;
    int square_n = 4;             // initial grid for square meshes
    int max_dofs = 2000000;
    int max_rounds = 40;
    bool zero_source = false;     // estimator: f = 0 with zero boundary data
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::string to_csv() const;
};

// Tables 1-3 layout: dim(fes), L^p error, EOC, W^{1,p} error, EOC, N[U]
Table run_convergence(const RunConfig& config);
// dofs, L^2 error, EOC, H^1 seminorm error, EOC, E(U,f), EOC
Table run_estimator(const RunConfig& config);
AdaptTrace run_adapt(const RunConfig& config);
// prints one line per property; returns 0 when all pass, 2 otherwise
int run_verify(const RunConfig& config);

int cli_main(int argc, char** argv);

} // namespace nfem
