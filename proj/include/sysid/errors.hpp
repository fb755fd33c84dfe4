#pragma once

#include <stdexcept>
#include <string>

namespace sysid {

// Input larger than a configured cap (Toeplitz assembly, net dimension,
// horizon search). Distinct from invalid input: the request is legal but
// over budget.
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// An iterative certificate (geometric tail, bisection bracket) failed to
// close within its cap.
struct NonConvergenceError : std::runtime_error {
    explicit NonConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sysid
