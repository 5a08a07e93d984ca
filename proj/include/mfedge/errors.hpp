#pragma once

#include <stdexcept>
#include <string>

namespace mfedge {

// Requested configuration has no solution (stability violated, empty
// feasible region, rho >= 1, ...).
struct infeasible_error : std::runtime_error {
  explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

// A solver failed to converge or produced an invalid state.
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mfedge
