#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlbiharm/analysis.hpp"
#include "nlbiharm/geometry.hpp"
#include "nlbiharm/kernel.hpp"
#include "nlbiharm/nonlocal_ops.hpp"
#include "nlbiharm/solver.hpp"

namespace nlbiharm {

/// Line-based configuration: `section.key = value`, `#` starts a comment,
/// lists are comma-separated. Unknown keys are rejected.
struct Config {
  // domain
  std::string domain_shape = "rectangle";
  double domain_x0 = 0, domain_y0 = 0, domain_x1 = 1, domain_y1 = 1;
  double domain_cx = 0, domain_cy = 0, domain_radius = 1;

  // kernel
  std::string kernel_family = "bump";
  double kernel_delta = 0.1;
  int kernel_dim = 2;

  // grid: exactly one of m (nodes per horizon) or h
  std::optional<int> grid_m;
  std::optional<double> grid_h;

  // problem
  std::string problem_kind = "poisson";
  std::string problem_forcing = "zero";
  std::string problem_collar = "one_delta";

  // solver
  double solver_tol = 1e-10;
  int solver_max_iter = 0;
  std::string solver_preconditioner = "none";

  // study
  std::string study_kind;
  std::string study_case = "sine_square";
  std::vector<double> study_deltas;
  std::optional<int> study_m;

  // output
  std::string output_csv;
  std::string output_node_dump;

  static Config parse_file(const std::string& path);
  static Config parse_stream(std::istream& is);

  /// Prints every key with its resolved value.
  void echo(std::ostream& os) const;

  Domain domain() const;
  KernelSpec kernel() const;
  double resolved_h() const;           // from grid.m or grid.h
  ProblemKind kind() const;
  CollarWidth collar() const;
  SolverOptions solver_options() const;

  /// Forcing field per problem.forcing: zero, constant:<v>, lap_of:<case>,
  /// bilap_of:<case>.
  Field forcing(std::shared_ptr<const Discretization> disc) const;
};

}  // namespace nlbiharm
