#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "nlbiharm/field.hpp"
#include "nlbiharm/geometry.hpp"
#include "nlbiharm/kernel.hpp"

namespace nlbiharm {

enum class QuadratureScheme {
  midpoint_skip,   // midpoint weights on every neighbor cell, self cell omitted
  ring_corrected,  // inner 3x3 block carries moment-corrected weights
};

QuadratureScheme parse_quadrature(const std::string& name);
std::string to_string(QuadratureScheme scheme);

/// Discrete scaled nonlocal Laplacian: sparse, symmetric, rows sum to zero.
/// Off-diagonal entries are the nonnegative pair weights
///   w_ij ≈ sigma * mu(|x_i-x_j|) * h^d  (scheme-dependent near the center),
/// computed once per unordered pair, so symmetry is bit-exact. The diagonal
/// is -Σ_j w_ij accumulated in ascending column order. apply() uses the
/// difference form Σ_j w_ij (u_j - u_i), which annihilates constants exactly.
class NonlocalOperator {
 public:
  const std::shared_ptr<const Discretization>& disc() const { return disc_; }
  QuadratureScheme scheme() const { return scheme_; }
  double sigma() const { return sigma_; }
  double delta() const { return disc_->delta(); }

  int rows() const { return disc_->node_count(); }
  std::int64_t nonzeros() const {
    return static_cast<std::int64_t>(cols_.size()) + rows();
  }

  /// Stored entry A_ij (0 when j is not a neighbor of i). Diagonal included.
  double entry(int i, int j) const;
  double diagonal(int i) const { return diag_[i]; }

  /// Row i off-diagonal span, columns ascending.
  struct RowView {
    const std::int32_t* cols;
    const double* weights;
    int size;
  };
  RowView row(int i) const {
    return {cols_.data() + row_ptr_[i], w_.data() + row_ptr_[i],
            static_cast<int>(row_ptr_[i + 1] - row_ptr_[i])};
  }

  Eigen::VectorXd apply_vector(const Eigen::VectorXd& u) const;

  /// Matrix-market-style dump: header, `n n nnz`, then 1-based `i j value`
  /// triples sorted row-major (diagonal included).
  void dump_matrix(std::ostream& os) const;

  // test hook: breaks one stored pair weight so symmetry checks can be
  // exercised against an injected fault
  void debug_break_symmetry();

  friend NonlocalOperator assemble_laplacian(
      std::shared_ptr<const Discretization> disc, const KernelSpec& spec,
      QuadratureScheme scheme);

 private:
  std::shared_ptr<const Discretization> disc_;
  QuadratureScheme scheme_ = QuadratureScheme::midpoint_skip;
  double sigma_ = 0;
  std::vector<std::int64_t> row_ptr_;
  std::vector<std::int32_t> cols_;
  std::vector<double> w_;
  Eigen::VectorXd diag_;
};

/// Assembles the scaled nonlocal Laplacian for spec.delta == disc.delta.
NonlocalOperator assemble_laplacian(std::shared_ptr<const Discretization> disc,
                                    const KernelSpec& spec,
                                    QuadratureScheme scheme);

/// Sparse matrix-vector product, linear in u.
Field apply(const NonlocalOperator& op, const Field& u);

/// L[L[u]]. Values carry full nonlocal meaning only where dist > 2*delta;
/// in the collars they reflect horizon truncation.
Field apply_biharmonic(const NonlocalOperator& op, const Field& u);

/// Pairwise gradient energy Σ_{i<j} w_ij (u_i-u_j)(w_i-w_j); equals
/// -<apply(op,u), w> up to round-off.
double gradient_energy(const NonlocalOperator& op, const Field& u,
                       const Field& w);

/// Relative defect of the discrete integration-by-parts identity
/// <L u, w> h^d = -energy(u, w) h^d; at most ~1e-14 for any symmetric
/// assembly.
double ibp_residual(const NonlocalOperator& op, const Field& u,
                    const Field& w);

/// Nonlocal normal operator applied to the two-point gradient of u: at each
/// node outside `outer`, sigma * Σ_{j in outer} (u_j - u_i) mu(r_ij) h^d.
/// Zero where no outer node lies within the horizon.
Field nonlocal_normal(const NonlocalOperator& op, const KernelSpec& spec,
                      const Field& u, RegionMask outer = kRegionCollarOuter);

/// Max over lattice-adjacent in-domain node pairs of |L[u]_i - L[u]_j| / h.
double lipschitz_probe(const NonlocalOperator& op, const Field& u);

}  // namespace nlbiharm
