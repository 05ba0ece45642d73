#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nfem {

struct PropertyResult {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool larger_is_better = false; // pass means measured >= threshold
    bool pass = false;
};

// Structural property suite covering quadrature exactness, partition of
// unity, projection idempotence, the jump identity, Jacobian consistency,
// bisection stability, Newton behaviour and the conservation-law sign
// convention. Fast enough to run on every build.
std::vector<PropertyResult> run_verify_suite(std::uint64_t seed);

} // namespace nfem
