// Acceptance suite: runs every verification gate end to end and prints one
// PASS/FAIL line per criterion. Exit status is the number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "nlbiharm/analysis.hpp"
#include "nlbiharm/solver.hpp"
#include "oracles.hpp"

using namespace nlbiharm;

namespace {

int failures = 0;

class Criterion {
 public:
  Criterion(int number, const char* title)
      : number_(number), title_(title),
        start_(std::chrono::steady_clock::now()) {}

  void detail(const std::string& text) { details_.push_back(text); }

  void finish(bool ok) {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_)
            .count();
    std::printf("criterion %2d [%-22s]: %s (%.1fs)\n", number_, title_,
                ok ? "PASS" : "FAIL", seconds);
    for (const std::string& d : details_) {
      std::printf("              - %s\n", d.c_str());
    }
    if (!ok) ++failures;
  }

 private:
  int number_;
  const char* title_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> details_;
};

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

struct Setup {
  std::shared_ptr<const Discretization> disc;
  KernelSpec spec;
  NonlocalOperator op;
};

Setup make_setup(double delta, int m, Domain domain = Domain::unit_square(),
                 QuadratureScheme scheme = QuadratureScheme::ring_corrected) {
  auto disc = Discretization::build(domain, delta / m, delta);
  KernelSpec spec = KernelSpec::make(KernelFamily::bump, delta, 2);
  NonlocalOperator op = assemble_laplacian(disc, spec, scheme);
  return Setup{std::move(disc), spec, std::move(op)};
}

Field random_field(const std::shared_ptr<const Discretization>& disc,
                   std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Field f(disc);
  for (int i = 0; i < f.size(); ++i) f.values[i] = unif(rng);
  return f;
}

void criterion_1_scaling_constant() {
  Criterion c(1, "scaling constant");
  double worst = 0.0;
  for (const KernelFamily family :
       {KernelFamily::bump, KernelFamily::polynomial}) {
    for (const int dim : {2, 3}) {
      for (const double delta : {0.2, 0.1, 0.05, 0.025}) {
        const KernelSpec spec = KernelSpec::make(family, delta, dim);
        worst = std::max(worst,
                         std::abs(c_delta(spec) - 1.0 / (2.0 * dim)));
      }
    }
  }
  c.detail(fmt("max |C(delta) - 1/(2d)| = %.3e over 16 kernels", worst));
  c.finish(worst <= 1e-8);
}

void criterion_2_integration_by_parts() {
  Criterion c(2, "integration by parts");
  const Setup s = make_setup(0.15, 6);  // 40x40 unit-square grid
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    const Field u = random_field(s.disc, rng);
    const Field w = random_field(s.disc, rng);
    worst = std::max(worst, ibp_residual(s.op, u, w));
  }
  c.detail(fmt("grid 40x40, max relative residual = %.3e over 20 pairs",
               worst));
  c.finish(worst <= 1e-12);
}

void criterion_3_operator_structure() {
  Criterion c(3, "operator structure");
  const Setup s = make_setup(0.15, 6);
  bool symmetric = true;
  bool row_sums_zero = true;
  for (int i = 0; i < s.op.rows(); ++i) {
    const auto row = s.op.row(i);
    double sum = 0.0;
    for (int k = 0; k < row.size; ++k) {
      if (s.op.entry(row.cols[k], i) != row.weights[k]) symmetric = false;
      sum += row.weights[k];
    }
    if (sum + s.op.diagonal(i) != 0.0) row_sums_zero = false;
  }
  std::mt19937_64 rng(7);
  double worst = -1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const Field u = random_field(s.disc, rng);
    worst = std::max(worst, apply(s.op, u).values.dot(u.values) /
                                u.values.squaredNorm());
  }
  c.detail(std::string("bit-exact symmetry: ") + (symmetric ? "yes" : "NO"));
  c.detail(std::string("rows sum to zero: ") + (row_sums_zero ? "yes" : "NO"));
  c.detail(fmt("max <Au,u>/|u|^2 over 1000 fields = %.3e", worst));
  c.finish(symmetric && row_sums_zero && worst <= 1e-12);
}

void criterion_4_laplacian_rate() {
  Criterion c(4, "pointwise laplacian");
  const std::vector<double> deltas{0.2, 0.1, 0.05, 0.025};
  const StudyResult sine = run_pointwise_laplacian_study(
      Domain::unit_square(), ManufacturedCase::sine_square(), deltas, 8,
      KernelFamily::bump, QuadratureScheme::ring_corrected);
  c.detail(fmt("sine fitted order = %.3f (threshold 1.8)", sine.fitted_order));

  const StudyResult quad = run_pointwise_laplacian_study(
      Domain::unit_square(), ManufacturedCase::quadratic(), {0.2}, 8,
      KernelFamily::bump, QuadratureScheme::ring_corrected);
  const double rel = quad.rows[0].error_linf / 4.0;  // |Δu| = 4
  c.detail(fmt("quadratic relative error at m=8: %.3e (threshold 1e-2)", rel));
  c.finish(sine.fitted_order >= 1.8 && rel <= 1e-2 && sine.passed);
}

void criterion_5_biharmonic_rate() {
  Criterion c(5, "pointwise biharmonic");
  const StudyResult sine = run_pointwise_biharmonic_study(
      Domain::unit_square(), ManufacturedCase::sine_square(),
      {0.2, 0.1, 0.05, 0.025}, 8, KernelFamily::bump,
      QuadratureScheme::ring_corrected);
  c.detail(fmt("sine fitted order = %.3f (threshold 0.8)", sine.fitted_order));
  c.finish(sine.fitted_order >= 0.8);
}

void criterion_6_poisson_convergence() {
  Criterion c(6, "poisson convergence");
  const StudyResult r = run_solution_study(
      ProblemKind::poisson, Domain::unit_square(),
      ManufacturedCase::sine_square(), {0.2, 0.1, 0.05}, 6,
      KernelFamily::bump, QuadratureScheme::ring_corrected, SolverOptions{});
  bool decreasing = true;
  for (std::size_t k = 1; k < r.rows.size(); ++k) {
    decreasing = decreasing && r.rows[k].error_l2 < r.rows[k - 1].error_l2;
  }
  const double rel = r.rows.back().error_l2 / 0.5;  // ||sin sin||_L2 = 1/2
  c.detail(std::string("errors strictly decreasing: ") +
           (decreasing ? "yes" : "NO"));
  for (const StudyRow& row : r.rows) {
    c.detail(fmt("delta=%.3f  L2 error=%.4f  (%.1f%% of ||u||)", row.delta,
                 row.error_l2, 100.0 * row.error_l2 / 0.5));
  }
  c.detail(fmt("final error = %.1f%% of ||u|| (threshold 5%%)", 100.0 * rel));
  c.finish(decreasing && rel <= 0.05);
}

void criterion_7_hinged() {
  Criterion c(7, "hinged");
  SolverOptions opts;
  opts.max_iter = 20000;

  // splitting vs monolithic agreement on every grid of the study matrix
  double worst_gap = 0.0;
  for (const double delta : {0.2, 0.1, 0.05}) {
    const Setup s = make_setup(delta, 6);
    const Field f = sample(s.disc, [](double x, double y) {
      return 4.0 * std::pow(M_PI, 4) * std::sin(M_PI * x) *
             std::sin(M_PI * y);
    });
    const SolveReport split = solve_hinged_split(s.op, f, opts);
    const SolveReport mono = solve_hinged_monolithic(s.op, f, opts);
    const double scale = mono.solution.values.cwiseAbs().maxCoeff();
    worst_gap = std::max(
        worst_gap, (split.solution.values - mono.solution.values)
                           .cwiseAbs()
                           .maxCoeff() /
                       (10.0 * opts.tol * scale));
  }
  const bool agree = worst_gap <= 1.0;
  c.detail(fmt("split vs monolithic: max gap = %.2f x (10 tol |u|)",
               worst_gap));

  const StudyResult r = run_solution_study(
      ProblemKind::hinged_split, Domain::unit_square(),
      ManufacturedCase::sine_square(), {0.2, 0.1, 0.05}, 6,
      KernelFamily::bump, QuadratureScheme::ring_corrected, opts);
  bool decreasing = true;
  for (std::size_t k = 1; k < r.rows.size(); ++k) {
    decreasing = decreasing && r.rows[k].error_l2 < r.rows[k - 1].error_l2;
  }
  const double rel = r.rows.back().error_l2 / 0.5;
  c.detail(std::string("errors strictly decreasing: ") +
           (decreasing ? "yes" : "NO"));
  c.detail(fmt("final error = %.1f%% of ||u|| (threshold 5%%)", 100.0 * rel));
  c.finish(agree && decreasing && rel <= 0.05);
}

void criterion_8_clamped() {
  Criterion c(8, "clamped");
  SolverOptions opts;
  opts.max_iter = 40000;
  opts.jacobi = true;
  const StudyResult r = run_solution_study(
      ProblemKind::clamped, Domain::disk(0, 0, 1),
      ManufacturedCase::clamped_disk(), {0.2, 0.1, 0.05}, 6,
      KernelFamily::bump, QuadratureScheme::ring_corrected, opts);
  bool decreasing = true;
  for (std::size_t k = 1; k < r.rows.size(); ++k) {
    decreasing = decreasing && r.rows[k].error_l2 < r.rows[k - 1].error_l2;
  }
  const double exact_norm = std::sqrt(M_PI / 5.0);  // ||(1-r^2)^2||_L2(disk)
  const double rel = r.rows.back().error_l2 / exact_norm;
  c.detail(std::string("errors strictly decreasing: ") +
           (decreasing ? "yes" : "NO"));
  for (const StudyRow& row : r.rows) {
    c.detail(fmt("delta=%.3f  L2 error=%.4f  iterations=%.0f", row.delta,
                 row.error_l2, static_cast<double>(row.iterations)));
  }
  c.detail(fmt("final error = %.1f%% of ||u|| (threshold 5%%)", 100.0 * rel));
  c.finish(decreasing && rel <= 0.05);
}

void criterion_9_coercivity() {
  Criterion c(9, "coercivity");
  // dense eigensolve oracle on the 15x15 grid validates the estimator
  const Setup s = make_setup(0.2, 3);
  const Eigen::MatrixXd L = oracles::dense_operator(s.op);
  const int n = s.op.rows();
  const auto dense_min = [&](CollarWidth collar) {
    const auto mask = unknown_mask(*s.disc, collar);
    std::vector<int> idx;
    for (int i = 0; i < n; ++i) {
      if (mask[i]) idx.push_back(i);
    }
    Eigen::MatrixXd A(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = 0; b < idx.size(); ++b) {
        A(a, b) = -L(idx[a], idx[b]);
      }
    }
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A)
        .eigenvalues()
        .minCoeff();
  };
  const double oracle_poisson = dense_min(CollarWidth::one_delta);
  const double oracle_hinged =
      std::min(oracle_poisson, dense_min(CollarWidth::two_delta));
  const auto mask2 = unknown_mask(*s.disc, CollarWidth::two_delta);
  std::vector<int> idx2;
  for (int i = 0; i < n; ++i) {
    if (mask2[i]) idx2.push_back(i);
  }
  Eigen::MatrixXd M(n, idx2.size());
  for (std::size_t k = 0; k < idx2.size(); ++k) M.col(k) = L.col(idx2[k]);
  const double oracle_clamped =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M.transpose() * M)
          .eigenvalues()
          .minCoeff();

  bool oracle_ok = true;
  const auto check_against = [&](ProblemKind kind, double oracle) {
    const double est = estimate_coercivity(s.op, kind);
    const bool ok = std::abs(est - oracle) <= 0.01 * oracle;
    oracle_ok = oracle_ok && ok;
    c.detail(fmt((to_string(kind) +
                  ": estimate %.6g vs dense %.6g").c_str(),
                 est, oracle));
  };
  check_against(ProblemKind::poisson, oracle_poisson);
  check_against(ProblemKind::hinged_split, oracle_hinged);
  check_against(ProblemKind::clamped, oracle_clamped);

  // positivity for all kinds and stability of the poisson estimate across
  // the ladder at fixed m
  bool positive = true;
  std::vector<double> poisson_ladder;
  for (const double delta : {0.2, 0.1, 0.05}) {
    const Setup sd = make_setup(delta, 3);
    for (const ProblemKind kind :
         {ProblemKind::poisson, ProblemKind::hinged_split,
          ProblemKind::clamped}) {
      const double est = estimate_coercivity(sd.op, kind);
      positive = positive && est > 0.0;
      if (kind == ProblemKind::poisson) poisson_ladder.push_back(est);
    }
  }
  const double lo =
      *std::min_element(poisson_ladder.begin(), poisson_ladder.end());
  const double hi =
      *std::max_element(poisson_ladder.begin(), poisson_ladder.end());
  c.detail(std::string("all kinds positive on the ladder: ") +
           (positive ? "yes" : "NO"));
  c.detail(fmt("poisson stability across deltas: %.4g .. %.4g (ratio %.2f)",
               lo, hi, hi / lo));
  c.finish(oracle_ok && positive && hi / lo < 3.0);
}

void criterion_10_lipschitz() {
  Criterion c(10, "lipschitz probe");
  std::vector<double> probes;
  for (const int m : {4, 8, 16}) {
    const Setup s = make_setup(0.2, m);
    const Field u =
        sample(s.disc, [](double x, double y) { return x * x + y * y; });
    probes.push_back(lipschitz_probe(s.op, u));
  }
  const double lo = *std::min_element(probes.begin(), probes.end());
  const double hi = *std::max_element(probes.begin(), probes.end());
  c.detail(fmt("probes at h=delta/{4,8,16}: %.4g / %.4g / %.4g", probes[0],
               probes[1], probes[2]));
  c.detail(fmt("spread = %.2fx (threshold 2x)", hi / lo));
  c.finish(hi / lo < 2.0);
}

}  // namespace

int main() {
  std::printf("acceptance suite\n================\n");
  criterion_1_scaling_constant();
  criterion_2_integration_by_parts();
  criterion_3_operator_structure();
  criterion_4_laplacian_rate();
  criterion_5_biharmonic_rate();
  criterion_6_poisson_convergence();
  criterion_7_hinged();
  criterion_8_clamped();
  criterion_9_coercivity();
  criterion_10_lipschitz();
  std::printf("================\n%d of 10 criteria failed\n", failures);
  return failures;
}
