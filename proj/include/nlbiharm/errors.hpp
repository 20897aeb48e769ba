#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nlbiharm {

/// Invalid user-supplied configuration (bad kernel parameters, under-resolved
/// grids, malformed config files). Maps to CLI exit code 2.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// A quadrature or iteration failed to reach its requested tolerance.
class numeric_error : public std::runtime_error {
 public:
  numeric_error(const std::string& what, double achieved_tolerance)
      : std::runtime_error(what + " (achieved tolerance " +
                           std::to_string(achieved_tolerance) + ")"),
        achieved_tolerance(achieved_tolerance) {}

  double achieved_tolerance;
};

/// Linear solver stagnation. Carries the residual history for post-mortems.
class solver_error : public std::runtime_error {
 public:
  solver_error(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}

  std::vector<double> residual_history;
};

}  // namespace nlbiharm
