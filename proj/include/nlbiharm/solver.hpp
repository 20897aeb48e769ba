#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>
#include <string>
#include <vector>

#include "nlbiharm/field.hpp"
#include "nlbiharm/nonlocal_ops.hpp"

namespace nlbiharm {

enum class ProblemKind { poisson, hinged_monolithic, hinged_split, clamped };
enum class CollarWidth { one_delta, two_delta };

ProblemKind parse_problem_kind(const std::string& name);
std::string to_string(ProblemKind kind);

struct SolverOptions {
  double tol = 1e-10;  // relative residual target
  int max_iter = 0;    // 0: min(20000, ceil(50 sqrt(n)))
  bool jacobi = false; // diagonal preconditioning
};

struct SolveReport {
  Field solution;
  int iterations = 0;
  double residual = 0;             // final relative residual
  double coercivity_estimate = 0;  // smallest Rayleigh quotient seen by CG
};

/// Conjugate gradients on an SPD operator given as a matvec. Constraints are
/// handled by the callers through reduction to the unknown set, never by
/// penalties. Throws solver_error with the residual history on stagnation.
struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0;
  double min_rayleigh = 0;
  std::vector<double> history;
};

using MatVec = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using CgObserver = std::function<void(int iter, const Eigen::VectorXd& x)>;

CgResult conjugate_gradient(const MatVec& A, const Eigen::VectorXd& b,
                            const SolverOptions& opts,
                            const Eigen::VectorXd* jacobi_diag = nullptr,
                            const CgObserver& observer = nullptr);

/// Unknown-node mask (1 = unknown) for the given constraint collar.
std::vector<char> unknown_mask(const Discretization& disc, CollarWidth collar);

/// Solves L u = f on the unknown set {dist > collar}, u = 0 elsewhere, via CG
/// on the SPD reduced system (-L) u = -f.
SolveReport solve_poisson(const NonlocalOperator& op, const Field& f,
                          CollarWidth collar, const SolverOptions& opts = {});

/// Two-stage splitting of the hinged problem: first L v = f with v = 0 off
/// Ω_2δ, then L u = v with u = 0 off Ω_δ.
SolveReport solve_hinged_split(const NonlocalOperator& op, const Field& f,
                               const SolverOptions& opts = {});

/// The coupled hinged system (rows of L∘L on Ω_2δ equal f, rows of L on
/// Ω_δ\Ω_2δ equal 0, u = 0 elsewhere), solved by block elimination on
/// explicitly assembled reduced matrices. Algebraically equivalent to the
/// splitting; exercised as an independent path.
SolveReport solve_hinged_monolithic(const NonlocalOperator& op, const Field& f,
                                    const SolverOptions& opts = {});

/// Clamped problem: (L∘L) u = f on Ω_2δ with u = 0 on Ω\Ω_2δ. CG on the
/// composed operator; each matvec is two sparse applies over all in-domain
/// nodes (intermediate collar values of L[u] are retained).
SolveReport solve_clamped(const NonlocalOperator& op, const Field& f,
                          const SolverOptions& opts = {});

/// Explicitly assembled L∘L. The product densifies (doubled bandwidth), so
/// this is restricted to grids of at most 2500 nodes; it backs the direct
/// clamped solve used to cross-check the matrix-free CG route.
Eigen::SparseMatrix<double> assemble_biharmonic(const NonlocalOperator& op);

/// Direct (sparse LU) solve of the clamped problem on small grids.
SolveReport solve_clamped_direct(const NonlocalOperator& op, const Field& f);

SolveReport solve(const NonlocalOperator& op, ProblemKind kind, const Field& f,
                  const SolverOptions& opts = {},
                  CollarWidth poisson_collar = CollarWidth::one_delta);

/// Smallest Rayleigh quotient of the reduced SPD form(s) backing the given
/// problem kind, by inverse power iteration (20 steps, inner CG). For the
/// hinged kinds this is the smaller of the two stage-system estimates.
double estimate_coercivity(const NonlocalOperator& op, ProblemKind kind,
                           int power_steps = 20);

}  // namespace nlbiharm
