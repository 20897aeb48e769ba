#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlbiharm/field.hpp"
#include "nlbiharm/solver.hpp"

namespace nlbiharm {

/// Analytic test solution with closed-form Laplacian and bilaplacian. The
/// derivative closures are verified against central finite differences at
/// construction.
struct ManufacturedCase {
  std::string name;
  std::function<double(double, double)> u;
  std::function<double(double, double)> lap_u;    // Δu
  std::function<double(double, double)> bilap_u;  // Δ²u

  static ManufacturedCase constant();
  static ManufacturedCase linear();
  static ManufacturedCase quadratic();                      // x² + y²
  static ManufacturedCase sine_square(int mx = 1, int ny = 1);
  static ManufacturedCase clamped_disk();                   // (1 - r²)²
  static ManufacturedCase by_name(const std::string& name);
};

/// Discrete L² norm over a region: sqrt(h^d Σ_{label(i) ∈ region} e_i²).
double l2_norm(const Discretization& disc, const Field& e,
               RegionMask region = kRegionInDomain);
double linf_norm(const Discretization& disc, const Field& e,
                 RegionMask region = kRegionInDomain);

struct StudyRow {
  double delta;
  double h;
  int m;
  double error_l2;
  double error_linf;
  int iterations;
};

struct StudyResult {
  std::vector<StudyRow> rows;  // sorted by descending delta
  double fitted_order = 0;     // NaN when fewer than 3 usable rows
  double target_order = 0;     // 0: no target rate (report-only)
  bool passed = false;
  std::string warning;
};

/// Least-squares slope of log(error_l2) against log(delta). Zero-error rows
/// are excluded; fewer than 3 usable rows is an error.
double fit_order(const std::vector<StudyRow>& rows);

/// Pointwise consistency of the discrete Laplacian: for each delta builds a
/// grid with h = delta/m, applies the operator to samples of the case, and
/// measures errors against Δu over nodes with dist > delta. Target order 2.
StudyResult run_pointwise_laplacian_study(const Domain& domain,
                                          const ManufacturedCase& mc,
                                          const std::vector<double>& deltas,
                                          int m, KernelFamily family,
                                          QuadratureScheme scheme);

/// Same protocol for L[L[u]] against Δ²u over nodes with dist > 2 delta.
/// Target order 1.
StudyResult run_pointwise_biharmonic_study(const Domain& domain,
                                           const ManufacturedCase& mc,
                                           const std::vector<double>& deltas,
                                           int m, KernelFamily family,
                                           QuadratureScheme scheme);

/// Solves the problem with forcing Δu (poisson) or Δ²u (biharmonic kinds)
/// and records ||u_delta - u||_{L²(Ω)} over all in-domain nodes, collar
/// included. No target rate applies: passed = strictly decreasing errors and
/// final error <= 5% of ||u||_{L²}.
StudyResult run_solution_study(ProblemKind kind, const Domain& domain,
                               const ManufacturedCase& mc,
                               const std::vector<double>& deltas, int m,
                               KernelFamily family, QuadratureScheme scheme,
                               const SolverOptions& opts = {});

/// Study CSV: header, one row per delta, footer comments with the fit and
/// verdict.
void write_study_csv(std::ostream& os, const StudyResult& result);

}  // namespace nlbiharm
