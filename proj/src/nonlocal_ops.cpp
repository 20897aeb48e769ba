#include "nlbiharm/nonlocal_ops.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "nlbiharm/errors.hpp"
#include "nlbiharm/quadrature.hpp"

namespace nlbiharm {

QuadratureScheme parse_quadrature(const std::string& name) {
  if (name == "midpoint_skip") return QuadratureScheme::midpoint_skip;
  if (name == "ring_corrected") return QuadratureScheme::ring_corrected;
  throw config_error("unknown quadrature scheme '" + name + "'");
}

std::string to_string(QuadratureScheme scheme) {
  return scheme == QuadratureScheme::midpoint_skip ? "midpoint_skip"
                                                   : "ring_corrected";
}

namespace {

struct Offset {
  int dx, dy;
  int q;          // dx^2 + dy^2
  double weight;  // pair weight, sigma included
};

// Translation-invariant weight table for one discretization. Weights depend
// on the lattice offset only, so writing the same value to both directed
// entries of a pair is automatic.
std::vector<Offset> offset_table(const Discretization& disc,
                                 const KernelSpec& spec,
                                 QuadratureScheme scheme) {
  const double h = disc.h();
  const double delta = disc.delta();
  const double sigma = 2.0 * spec.dim;
  const double q_max = (delta / h) * (delta / h);
  const int reach = disc.m();

  std::vector<Offset> offsets;
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const int q = dx * dx + dy * dy;
      if (q == 0 || static_cast<double>(q) >= q_max) continue;
      offsets.push_back(Offset{dx, dy, q, 0.0});
    }
  }

  const bool ring = scheme == QuadratureScheme::ring_corrected;
  for (Offset& o : offsets) {
    if (ring && std::max(std::abs(o.dx), std::abs(o.dy)) <= 1) continue;
    const double r = h * std::sqrt(static_cast<double>(o.q));
    o.weight = mu(spec, r) * h * h;
  }

  if (ring) {
    // Inner 3x3 weights by moment correction: the full stencil is made exact
    // on quadratics and on the z1^2 z2^2 quartic. With unit kernel mass,
    //   ∫_{B_δ} z1^2 mu dz = 1/2  exactly, and
    //   ∫_{B_δ} z1^2 z2^2 mu dz = (π/4) ∫_0^δ r^3 rho(r) dr.
    const double m2_full = 0.5;
    const double m22_full =
        0.25 * M_PI *
        integrate_adaptive(
            [&spec](double r) { return r * r * r * rho(spec, r); }, 0.0, delta,
            1e-13, 12);
    double s2 = 0.0, s22 = 0.0;
    for (const Offset& o : offsets) {
      const double zx = o.dx * h, zy = o.dy * h;
      s2 += o.weight * zx * zx;
      s22 += o.weight * zx * zx * zy * zy;
    }
    const double h2 = h * h;
    const double c_diag = (m22_full - s22) / (4.0 * h2 * h2);
    const double c_axis = ((m2_full - s2) - 4.0 * c_diag * h2) / (2.0 * h2);
    if (!(c_diag > 0.0) || !(c_axis > 0.0)) {
      throw numeric_error(
          "ring correction produced a nonpositive inner weight",
          std::min(c_axis, c_diag));
    }
    for (Offset& o : offsets) {
      if (std::max(std::abs(o.dx), std::abs(o.dy)) > 1) continue;
      o.weight = (o.q == 1 ? c_axis : c_diag);
    }
  }

  for (Offset& o : offsets) o.weight *= sigma;
  return offsets;
}

}  // namespace

NonlocalOperator assemble_laplacian(std::shared_ptr<const Discretization> disc,
                                    const KernelSpec& spec,
                                    QuadratureScheme scheme) {
  if (spec.delta != disc->delta()) {
    throw config_error("kernel horizon does not match the discretization");
  }
  if (spec.dim != 2) {
    throw config_error("operator assembly requires a 2-D kernel");
  }
  const std::vector<Offset> offsets = offset_table(*disc, spec, scheme);

  NonlocalOperator op;
  op.disc_ = disc;
  op.scheme_ = scheme;
  op.sigma_ = 2.0 * spec.dim;

  const int n = disc->node_count();
  op.row_ptr_.assign(n + 1, 0);
  op.cols_.reserve(static_cast<std::size_t>(n) * offsets.size() / 2);
  op.w_.reserve(op.cols_.capacity());
  op.diag_ = Eigen::VectorXd::Zero(n);

  std::vector<std::pair<std::int32_t, double>> row;
  for (int i = 0; i < n; ++i) {
    const Node& node = disc->node(i);
    row.clear();
    for (const Offset& o : offsets) {
      const int j = disc->node_at(node.ix + o.dx, node.iy + o.dy);
      if (j >= 0) row.emplace_back(j, o.weight);
    }
    std::sort(row.begin(), row.end());
    double s = 0.0;
    for (const auto& [col, w] : row) {
      op.cols_.push_back(col);
      op.w_.push_back(w);
      s += w;
    }
    op.diag_[i] = -s;
    op.row_ptr_[i + 1] = static_cast<std::int64_t>(op.cols_.size());
  }
  return op;
}

double NonlocalOperator::entry(int i, int j) const {
  if (i == j) return diag_[i];
  const auto begin = cols_.begin() + row_ptr_[i];
  const auto end = cols_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return w_[static_cast<std::size_t>(it - cols_.begin())];
}

Eigen::VectorXd NonlocalOperator::apply_vector(const Eigen::VectorXd& u) const {
  const int n = rows();
  if (u.size() != n) throw config_error("apply: field size mismatch");
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    const double ui = u[i];
    double s = 0.0;
    for (std::int64_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      s += w_[k] * (u[cols_[k]] - ui);
    }
    out[i] = s;
  }
  return out;
}

void NonlocalOperator::dump_matrix(std::ostream& os) const {
  const int n = rows();
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << n << ' ' << n << ' ' << nonzeros() << '\n';
  os.precision(17);
  for (int i = 0; i < n; ++i) {
    bool diag_written = false;
    for (std::int64_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (!diag_written && cols_[k] > i) {
        os << i + 1 << ' ' << i + 1 << ' ' << diag_[i] << '\n';
        diag_written = true;
      }
      os << i + 1 << ' ' << cols_[k] + 1 << ' ' << w_[k] << '\n';
    }
    if (!diag_written) os << i + 1 << ' ' << i + 1 << ' ' << diag_[i] << '\n';
  }
}

void NonlocalOperator::debug_break_symmetry() {
  if (!w_.empty()) w_[0] *= 1.0 + 1e-3;
}

Field apply(const NonlocalOperator& op, const Field& u) {
  require_disc(u, op.disc());
  if (!u.values.allFinite()) throw config_error("apply: field contains NaN/Inf");
  return Field(u.disc, op.apply_vector(u.values));
}

Field apply_biharmonic(const NonlocalOperator& op, const Field& u) {
  require_disc(u, op.disc());
  return Field(u.disc, op.apply_vector(op.apply_vector(u.values)));
}

double gradient_energy(const NonlocalOperator& op, const Field& u,
                       const Field& w) {
  require_disc(u, op.disc());
  require_same_disc(u, w);
  double e = 0.0;
  for (int i = 0; i < op.rows(); ++i) {
    const auto row = op.row(i);
    for (int k = 0; k < row.size; ++k) {
      const int j = row.cols[k];
      if (j <= i) continue;  // each unordered pair once
      e += row.weights[k] * (u.values[i] - u.values[j]) *
           (w.values[i] - w.values[j]);
    }
  }
  return e;
}

double ibp_residual(const NonlocalOperator& op, const Field& u,
                    const Field& w) {
  const double vol = op.disc()->cell_volume();
  const double lhs = apply(op, u).values.dot(w.values) * vol;
  const double rhs = gradient_energy(op, u, w) * vol;
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  if (scale == 0.0) return 0.0;
  return std::abs(lhs + rhs) / scale;
}

Field nonlocal_normal(const NonlocalOperator& op, const KernelSpec& spec,
                      const Field& u, RegionMask outer) {
  require_disc(u, op.disc());
  const Discretization& disc = *op.disc();
  const double h2 = disc.cell_volume();
  Field out(u.disc);
  for (int i = 0; i < disc.node_count(); ++i) {
    if (region_bit(disc.node(i).label) & outer) continue;
    double s = 0.0;
    for (const auto& [j, r] : disc.neighbors_within_horizon(i)) {
      if (!(region_bit(disc.node(j).label) & outer)) continue;
      s += (u.values[j] - u.values[i]) * mu(spec, r) * h2;
    }
    out.values[i] = op.sigma() * s;
  }
  return out;
}

double lipschitz_probe(const NonlocalOperator& op, const Field& u) {
  const Field lu = apply(op, u);
  const Discretization& disc = *op.disc();
  double worst = 0.0;
  for (int i = 0; i < disc.node_count(); ++i) {
    const Node& n = disc.node(i);
    for (const auto& [dx, dy] : {std::pair{1, 0}, std::pair{0, 1}}) {
      const int j = disc.node_at(n.ix + dx, n.iy + dy);
      if (j < 0) continue;
      worst = std::max(worst,
                       std::abs(lu.values[i] - lu.values[j]) / disc.h());
    }
  }
  return worst;
}

}  // namespace nlbiharm
