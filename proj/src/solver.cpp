#include "nlbiharm/solver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cmath>
#include <random>

#include "nlbiharm/errors.hpp"

namespace nlbiharm {

ProblemKind parse_problem_kind(const std::string& name) {
  if (name == "poisson") return ProblemKind::poisson;
  if (name == "hinged_monolithic") return ProblemKind::hinged_monolithic;
  if (name == "hinged_split") return ProblemKind::hinged_split;
  if (name == "clamped") return ProblemKind::clamped;
  throw config_error("unknown problem kind '" + name + "'");
}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::poisson: return "poisson";
    case ProblemKind::hinged_monolithic: return "hinged_monolithic";
    case ProblemKind::hinged_split: return "hinged_split";
    case ProblemKind::clamped: return "clamped";
  }
  return "?";
}

CgResult conjugate_gradient(const MatVec& A, const Eigen::VectorXd& b,
                            const SolverOptions& opts,
                            const Eigen::VectorXd* jacobi_diag,
                            const CgObserver& observer) {
  const int n = static_cast<int>(b.size());
  CgResult res;
  res.x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) return res;  // zero forcing, zero solution

  const int max_iter =
      opts.max_iter > 0
          ? opts.max_iter
          : std::min(20000, static_cast<int>(std::ceil(50.0 * std::sqrt(n))));

  Eigen::VectorXd r = b;
  Eigen::VectorXd z = jacobi_diag ? (r.array() / jacobi_diag->array()).matrix()
                                  : r;
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  res.min_rayleigh = std::numeric_limits<double>::infinity();
  res.history.push_back(1.0);

  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd Ap = A(p);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) {
      throw solver_error("CG: operator is not positive definite", res.history);
    }
    res.min_rayleigh = std::min(res.min_rayleigh, pAp / p.squaredNorm());
    const double alpha = rz / pAp;
    res.x += alpha * p;
    r -= alpha * Ap;
    res.iterations = it + 1;
    res.residual = r.norm() / bnorm;
    res.history.push_back(res.residual);
    if (observer) observer(it + 1, res.x);
    if (res.residual <= opts.tol) return res;
    if (jacobi_diag) {
      z = (r.array() / jacobi_diag->array()).matrix();
    } else {
      z = r;
    }
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  throw solver_error("CG stagnated after " + std::to_string(max_iter) +
                         " iterations (residual " +
                         std::to_string(res.residual) + ")",
                     res.history);
}

std::vector<char> unknown_mask(const Discretization& disc, CollarWidth collar) {
  std::vector<char> mask(disc.node_count(), 0);
  for (int i = 0; i < disc.node_count(); ++i) {
    const RegionLabel label = disc.node(i).label;
    const bool unknown = collar == CollarWidth::one_delta
                             ? label != RegionLabel::collar_outer
                             : label == RegionLabel::interior2d;
    mask[i] = unknown ? 1 : 0;
  }
  return mask;
}

namespace {

std::vector<int> mask_indices(const std::vector<char>& mask) {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(mask.size()); ++i) {
    if (mask[i]) idx.push_back(i);
  }
  return idx;
}

Eigen::VectorXd restrict_to(const std::vector<int>& idx,
                            const Eigen::VectorXd& full) {
  Eigen::VectorXd out(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) out[k] = full[idx[k]];
  return out;
}

Eigen::VectorXd extend_from(const std::vector<int>& idx, int n,
                            const Eigen::VectorXd& reduced) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = reduced[k];
  return out;
}

// (-L) restricted to the unknown set, as an explicit sparse matrix.
Eigen::SparseMatrix<double> reduced_neg_laplacian(const NonlocalOperator& op,
                                                  const std::vector<char>& mask,
                                                  const std::vector<int>& idx) {
  std::vector<int> full_to_red(mask.size(), -1);
  for (std::size_t k = 0; k < idx.size(); ++k) full_to_red[idx[k]] = int(k);
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const int i = idx[k];
    const auto row = op.row(i);
    for (int c = 0; c < row.size; ++c) {
      const int rj = full_to_red[row.cols[c]];
      if (rj >= 0) trip.emplace_back(int(k), rj, -row.weights[c]);
    }
    trip.emplace_back(int(k), int(k), -op.diagonal(i));
  }
  Eigen::SparseMatrix<double> A(idx.size(), idx.size());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

SolveReport report_from(const NonlocalOperator& op, const std::vector<int>& idx,
                        const CgResult& cg) {
  SolveReport rep;
  rep.solution = Field(op.disc());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    rep.solution.values[idx[k]] = cg.x[k];
  }
  rep.iterations = cg.iterations;
  rep.residual = cg.residual;
  rep.coercivity_estimate =
      std::isfinite(cg.min_rayleigh) ? cg.min_rayleigh : 0.0;
  return rep;
}

}  // namespace

SolveReport solve_poisson(const NonlocalOperator& op, const Field& f,
                          CollarWidth collar, const SolverOptions& opts) {
  require_disc(f, op.disc());
  const auto mask = unknown_mask(*op.disc(), collar);
  const auto idx = mask_indices(mask);
  if (idx.empty()) throw config_error("no unknown nodes for this collar");
  if (idx.size() == mask.size()) {
    throw config_error("constraint collar is empty");
  }
  const int n = op.rows();

  const MatVec A = [&](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(
        -restrict_to(idx, op.apply_vector(extend_from(idx, n, x))));
  };
  Eigen::VectorXd b = -restrict_to(idx, f.values);

  Eigen::VectorXd diag;
  if (opts.jacobi) {
    diag.resize(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      diag[k] = -op.diagonal(idx[k]);
    }
  }
  const CgResult cg = conjugate_gradient(A, b, opts,
                                         opts.jacobi ? &diag : nullptr);
  return report_from(op, idx, cg);
}

SolveReport solve_hinged_split(const NonlocalOperator& op, const Field& f,
                               const SolverOptions& opts) {
  SolveReport stage1;
  try {
    stage1 = solve_poisson(op, f, CollarWidth::two_delta, opts);
  } catch (const solver_error& e) {
    throw solver_error(std::string("hinged stage 1: ") + e.what(),
                       e.residual_history);
  }
  SolveReport stage2;
  try {
    stage2 = solve_poisson(op, stage1.solution, CollarWidth::one_delta, opts);
  } catch (const solver_error& e) {
    throw solver_error(std::string("hinged stage 2: ") + e.what(),
                       e.residual_history);
  }
  stage2.iterations += stage1.iterations;
  stage2.residual = std::max(stage1.residual, stage2.residual);
  stage2.coercivity_estimate =
      std::min(stage1.coercivity_estimate, stage2.coercivity_estimate);
  return stage2;
}

SolveReport solve_hinged_monolithic(const NonlocalOperator& op, const Field& f,
                                    const SolverOptions& opts) {
  require_disc(f, op.disc());
  const Discretization& disc = *op.disc();
  const auto mask2 = unknown_mask(disc, CollarWidth::two_delta);
  const auto mask1 = unknown_mask(disc, CollarWidth::one_delta);
  const auto idx2 = mask_indices(mask2);
  const auto idx1 = mask_indices(mask1);
  if (idx2.empty()) throw config_error("no unknown nodes on the 2-delta set");

  // Block elimination of the coupled system. The rows of L∘L on Ω_2δ read
  // L[u] only at Ω_δ nodes, where the inner-collar rows force L[u] = v with
  // v = 0 off Ω_2δ; both blocks are assembled reduced matrices.
  const Eigen::SparseMatrix<double> A2 = reduced_neg_laplacian(op, mask2, idx2);
  const Eigen::SparseMatrix<double> A1 = reduced_neg_laplacian(op, mask1, idx1);

  const MatVec mv2 = [&](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(A2 * x);
  };
  const MatVec mv1 = [&](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(A1 * x);
  };

  Eigen::VectorXd d2, d1;
  if (opts.jacobi) {
    d2 = A2.diagonal();
    d1 = A1.diagonal();
  }

  CgResult stage1;
  try {
    stage1 = conjugate_gradient(mv2, Eigen::VectorXd(-restrict_to(idx2, f.values)),
                                opts, opts.jacobi ? &d2 : nullptr);
  } catch (const solver_error& e) {
    throw solver_error(std::string("hinged stage 1: ") + e.what(),
                       e.residual_history);
  }
  const Eigen::VectorXd v_full = extend_from(idx2, op.rows(), stage1.x);

  CgResult stage2;
  try {
    stage2 = conjugate_gradient(mv1, Eigen::VectorXd(-restrict_to(idx1, v_full)),
                                opts, opts.jacobi ? &d1 : nullptr);
  } catch (const solver_error& e) {
    throw solver_error(std::string("hinged stage 2: ") + e.what(),
                       e.residual_history);
  }

  SolveReport rep = report_from(op, idx1, stage2);
  rep.iterations += stage1.iterations;
  rep.residual = std::max(stage1.residual, stage2.residual);
  rep.coercivity_estimate =
      std::min(stage1.min_rayleigh, stage2.min_rayleigh);
  return rep;
}

SolveReport solve_clamped(const NonlocalOperator& op, const Field& f,
                          const SolverOptions& opts) {
  require_disc(f, op.disc());
  const auto mask = unknown_mask(*op.disc(), CollarWidth::two_delta);
  const auto idx = mask_indices(mask);
  if (idx.empty()) throw config_error("no unknown nodes on the 2-delta set");
  const int n = op.rows();

  const MatVec B = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd full = extend_from(idx, n, x);
    return Eigen::VectorXd(
        restrict_to(idx, op.apply_vector(op.apply_vector(full))));
  };
  const Eigen::VectorXd b = restrict_to(idx, f.values);

  Eigen::VectorXd diag;
  if (opts.jacobi) {
    // diag(L^2)_ii = d_i^2 + sum_j w_ij^2
    diag.resize(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const int i = idx[k];
      const auto row = op.row(i);
      double s = op.diagonal(i) * op.diagonal(i);
      for (int c = 0; c < row.size; ++c) s += row.weights[c] * row.weights[c];
      diag[k] = s;
    }
  }
  const CgResult cg =
      conjugate_gradient(B, b, opts, opts.jacobi ? &diag : nullptr);
  return report_from(op, idx, cg);
}

Eigen::SparseMatrix<double> assemble_biharmonic(const NonlocalOperator& op) {
  const int n = op.rows();
  if (n > 2500) {
    throw config_error("assemble_biharmonic is limited to grids of at most "
                       "2500 nodes (the composed matrix densifies)");
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < n; ++i) {
    const auto row = op.row(i);
    for (int k = 0; k < row.size; ++k) {
      trip.emplace_back(i, row.cols[k], row.weights[k]);
    }
    trip.emplace_back(i, i, op.diagonal(i));
  }
  Eigen::SparseMatrix<double> L(n, n);
  L.setFromTriplets(trip.begin(), trip.end());
  return Eigen::SparseMatrix<double>(L * L);
}

SolveReport solve_clamped_direct(const NonlocalOperator& op, const Field& f) {
  require_disc(f, op.disc());
  const auto mask = unknown_mask(*op.disc(), CollarWidth::two_delta);
  const auto idx = mask_indices(mask);
  if (idx.empty()) throw config_error("no unknown nodes on the 2-delta set");

  const Eigen::SparseMatrix<double> B_full = assemble_biharmonic(op);
  std::vector<int> full_to_red(mask.size(), -1);
  for (std::size_t k = 0; k < idx.size(); ++k) full_to_red[idx[k]] = int(k);
  std::vector<Eigen::Triplet<double>> trip;
  for (int col = 0; col < B_full.outerSize(); ++col) {
    if (full_to_red[col] < 0) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(B_full, col); it;
         ++it) {
      const int ri = full_to_red[it.row()];
      if (ri >= 0) trip.emplace_back(ri, full_to_red[col], it.value());
    }
  }
  Eigen::SparseMatrix<double> B(idx.size(), idx.size());
  B.setFromTriplets(trip.begin(), trip.end());

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(B);
  if (lu.info() != Eigen::Success) {
    throw solver_error("sparse LU factorization of the composed system failed",
                       {});
  }
  const Eigen::VectorXd x = lu.solve(restrict_to(idx, f.values));

  SolveReport rep;
  rep.solution = Field(op.disc());
  for (std::size_t k = 0; k < idx.size(); ++k) rep.solution.values[idx[k]] = x[k];
  rep.iterations = 1;
  Eigen::VectorXd residual = B * x - restrict_to(idx, f.values);
  const double bn = restrict_to(idx, f.values).norm();
  rep.residual = bn > 0 ? residual.norm() / bn : 0.0;
  return rep;
}

SolveReport solve(const NonlocalOperator& op, ProblemKind kind, const Field& f,
                  const SolverOptions& opts, CollarWidth poisson_collar) {
  switch (kind) {
    case ProblemKind::poisson:
      return solve_poisson(op, f, poisson_collar, opts);
    case ProblemKind::hinged_split:
      return solve_hinged_split(op, f, opts);
    case ProblemKind::hinged_monolithic:
      return solve_hinged_monolithic(op, f, opts);
    case ProblemKind::clamped:
      return solve_clamped(op, f, opts);
  }
  throw config_error("unhandled problem kind");
}

namespace {

// Inverse power iteration for the smallest Rayleigh quotient of an SPD
// operator: y_{k+1} = A^{-1} x_k (by CG), Rayleigh quotient of the normalized
// iterate. Deterministic start vector.
double smallest_rayleigh(const MatVec& A, int n, int power_steps,
                         int cg_max_iter) {
  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = unif(rng);
  x.normalize();

  SolverOptions inner;
  inner.tol = 1e-9;
  inner.max_iter = cg_max_iter;
  double lambda = 0.0;
  for (int step = 0; step < power_steps; ++step) {
    const CgResult sol = conjugate_gradient(A, x, inner);
    x = sol.x.normalized();
    lambda = x.dot(A(x));
  }
  return lambda;
}

}  // namespace

double estimate_coercivity(const NonlocalOperator& op, ProblemKind kind,
                           int power_steps) {
  const Discretization& disc = *op.disc();
  const int n = op.rows();

  const auto poisson_form = [&](CollarWidth collar) {
    const auto mask = unknown_mask(disc, collar);
    const auto idx = mask_indices(mask);
    const MatVec A = [&op, idx, n](const Eigen::VectorXd& x) {
      return Eigen::VectorXd(
          -restrict_to(idx, op.apply_vector(extend_from(idx, n, x))));
    };
    return smallest_rayleigh(A, static_cast<int>(idx.size()), power_steps,
                             40000);
  };

  switch (kind) {
    case ProblemKind::poisson:
      return poisson_form(CollarWidth::one_delta);
    case ProblemKind::hinged_split:
    case ProblemKind::hinged_monolithic:
      // the two SPD stage systems the hinged solves run CG on
      return std::min(poisson_form(CollarWidth::two_delta),
                      poisson_form(CollarWidth::one_delta));
    case ProblemKind::clamped: {
      const auto mask = unknown_mask(disc, CollarWidth::two_delta);
      const auto idx = mask_indices(mask);
      const MatVec B = [&op, idx, n](const Eigen::VectorXd& x) {
        return Eigen::VectorXd(restrict_to(
            idx, op.apply_vector(op.apply_vector(extend_from(idx, n, x)))));
      };
      return smallest_rayleigh(B, static_cast<int>(idx.size()), power_steps,
                               40000);
    }
  }
  throw config_error("unhandled problem kind");
}

}  // namespace nlbiharm
