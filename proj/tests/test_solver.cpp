#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nlbiharm/errors.hpp"
#include "nlbiharm/solver.hpp"
#include "oracles.hpp"

using namespace nlbiharm;

namespace {

struct Setup {
  std::shared_ptr<const Discretization> disc;
  KernelSpec spec;
  NonlocalOperator op;
};

Setup make_setup(double delta, int m, Domain domain = Domain::unit_square()) {
  const double h = delta / m;
  auto disc = Discretization::build(domain, h, delta);
  KernelSpec spec = KernelSpec::make(KernelFamily::bump, delta, 2);
  NonlocalOperator op =
      assemble_laplacian(disc, spec, QuadratureScheme::ring_corrected);
  return Setup{std::move(disc), spec, std::move(op)};
}

Field random_supported(const std::shared_ptr<const Discretization>& disc,
                       const std::vector<char>& mask, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Field f(disc);
  for (int i = 0; i < f.size(); ++i) {
    if (mask[i]) f.values[i] = unif(rng);
  }
  return f;
}

}  // namespace

TEST_CASE("zero forcing gives the zero solution for every kind") {
  const Setup s = make_setup(0.15, 3);
  const Field zero(s.disc);
  for (const ProblemKind kind :
       {ProblemKind::poisson, ProblemKind::hinged_split,
        ProblemKind::hinged_monolithic, ProblemKind::clamped}) {
    const SolveReport rep = solve(s.op, kind, zero);
    CHECK(rep.solution.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK(rep.iterations == 0);
  }
}

TEST_CASE("round trip: solve(apply(w)) recovers w on the unknown set") {
  const Setup s = make_setup(0.2, 4);
  std::mt19937_64 rng(31);
  for (const CollarWidth collar :
       {CollarWidth::one_delta, CollarWidth::two_delta}) {
    const auto mask = unknown_mask(*s.disc, collar);
    const Field w = random_supported(s.disc, mask, rng);
    const Field f = apply(s.op, w);
    SolverOptions opts;
    opts.tol = 1e-12;
    const SolveReport rep = solve_poisson(s.op, f, collar, opts);
    CHECK((rep.solution.values - w.values).cwiseAbs().maxCoeff() <=
          10 * 1e-10 * w.values.cwiseAbs().maxCoeff() + 1e-9);
    CHECK(rep.residual <= opts.tol);
  }
}

TEST_CASE("constraints are enforced exactly by elimination") {
  const Setup s = make_setup(0.2, 4, Domain::disk(0, 0, 1));
  const Field f = sample(s.disc, [](double, double) { return 1.0; });
  const SolveReport rep =
      solve_poisson(s.op, f, CollarWidth::one_delta, SolverOptions{});
  for (int i = 0; i < s.disc->node_count(); ++i) {
    if (s.disc->node(i).label == RegionLabel::collar_outer) {
      CHECK(rep.solution.values[i] == 0.0);
    } else {
      CHECK(rep.solution.values[i] != 0.0);
    }
  }
  const SolveReport rep2 = solve_clamped(s.op, f, SolverOptions{});
  for (int i = 0; i < s.disc->node_count(); ++i) {
    if (s.disc->node(i).label != RegionLabel::interior2d) {
      CHECK(rep2.solution.values[i] == 0.0);
    }
  }
}

TEST_CASE("solve map is linear") {
  const Setup s = make_setup(0.2, 4);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Field f1(s.disc), f2(s.disc);
  for (int i = 0; i < f1.size(); ++i) {
    f1.values[i] = unif(rng);
    f2.values[i] = unif(rng);
  }
  Field fsum(s.disc);
  fsum.values = f1.values + f2.values;
  const auto u1 = solve_poisson(s.op, f1, CollarWidth::one_delta, {});
  const auto u2 = solve_poisson(s.op, f2, CollarWidth::one_delta, {});
  const auto usum = solve_poisson(s.op, fsum, CollarWidth::one_delta, {});
  const double scale = usum.solution.values.cwiseAbs().maxCoeff();
  CHECK((usum.solution.values - u1.solution.values - u2.solution.values)
            .cwiseAbs()
            .maxCoeff() <= 10 * 1e-10 * scale + 1e-12);
}

TEST_CASE("hinged split and monolithic agree on every grid in the matrix") {
  std::mt19937_64 rng(53);
  for (const double delta : {0.2, 0.1}) {
    for (const Domain& domain :
         {Domain::unit_square(), Domain::disk(0, 0, 1)}) {
      const Setup s = make_setup(delta, 4, domain);
      const Field f = sample(s.disc, [](double x, double y) {
        return 4.0 * std::pow(M_PI, 4) * std::sin(M_PI * x) *
               std::sin(M_PI * y);
      });
      SolverOptions opts;
      opts.tol = 1e-11;
      const SolveReport split = solve_hinged_split(s.op, f, opts);
      const SolveReport mono = solve_hinged_monolithic(s.op, f, opts);
      const double scale = mono.solution.values.cwiseAbs().maxCoeff();
      CHECK((split.solution.values - mono.solution.values)
                .cwiseAbs()
                .maxCoeff() <= 10 * opts.tol * scale);
    }
  }
}

TEST_CASE("hinged solution is zero on the outer collar and L[u] is zero on "
          "the inner collar") {
  const Setup s = make_setup(0.2, 4);
  const Field f = sample(s.disc, [](double x, double y) {
    return std::sin(M_PI * x) * std::sin(M_PI * y);
  });
  SolverOptions opts;
  opts.tol = 1e-12;
  const SolveReport rep = solve_hinged_split(s.op, f, opts);
  const Field lu = apply(s.op, rep.solution);
  double collar_inner_scale = 0.0;
  double interior_scale = 0.0;
  for (int i = 0; i < s.disc->node_count(); ++i) {
    switch (s.disc->node(i).label) {
      case RegionLabel::collar_outer:
        CHECK(rep.solution.values[i] == 0.0);
        break;
      case RegionLabel::collar_inner:
        collar_inner_scale =
            std::max(collar_inner_scale, std::abs(lu.values[i]));
        break;
      default:
        interior_scale = std::max(interior_scale, std::abs(lu.values[i]));
    }
  }
  CHECK(collar_inner_scale <= 1e-8 * interior_scale);
}

TEST_CASE("CG error decays monotonically in the operator norm") {
  const Setup s = make_setup(0.15, 3);
  std::mt19937_64 rng(61);
  const auto mask = unknown_mask(*s.disc, CollarWidth::one_delta);
  std::vector<int> idx;
  for (int i = 0; i < s.disc->node_count(); ++i) {
    if (mask[i]) idx.push_back(i);
  }
  const int nu = static_cast<int>(idx.size());

  const MatVec A = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(s.disc->node_count());
    for (int k = 0; k < nu; ++k) full[idx[k]] = x[k];
    const Eigen::VectorXd lu = s.op.apply_vector(full);
    Eigen::VectorXd out(nu);
    for (int k = 0; k < nu; ++k) out[k] = -lu[idx[k]];
    return out;
  };

  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd w(nu);
  for (int k = 0; k < nu; ++k) w[k] = unif(rng);
  const Eigen::VectorXd b = A(w);

  std::vector<double> energy_error;
  SolverOptions opts;
  opts.tol = 1e-12;
  conjugate_gradient(A, b, opts, nullptr,
                     [&](int, const Eigen::VectorXd& x) {
                       const Eigen::VectorXd e = x - w;
                       energy_error.push_back(std::sqrt(e.dot(A(e))));
                     });
  REQUIRE(energy_error.size() >= 5);
  for (std::size_t k = 1; k < energy_error.size(); ++k) {
    CHECK(energy_error[k] <= energy_error[k - 1] * (1.0 + 1e-10) + 1e-13);
  }
}

TEST_CASE("CG reports stagnation with a residual history") {
  const Setup s = make_setup(0.2, 4);
  const Field f = sample(s.disc, [](double x, double y) {
    return std::sin(M_PI * x) * std::sin(M_PI * y);
  });
  SolverOptions opts;
  opts.tol = 1e-14;
  opts.max_iter = 3;
  try {
    solve_poisson(s.op, f, CollarWidth::one_delta, opts);
    FAIL("expected solver_error");
  } catch (const solver_error& e) {
    CHECK(e.residual_history.size() >= 3);
  }
}

TEST_CASE("hinged solver failures are tagged by stage") {
  const Setup s = make_setup(0.2, 4);
  const Field f = sample(s.disc, [](double x, double y) {
    return 4.0 * std::pow(M_PI, 4) * std::sin(M_PI * x) * std::sin(M_PI * y);
  });
  SolverOptions opts;
  opts.max_iter = 1;
  try {
    solve_hinged_split(s.op, f, opts);
    FAIL("expected solver_error");
  } catch (const solver_error& e) {
    CHECK(std::string(e.what()).find("stage 1") != std::string::npos);
  }
  try {
    solve_hinged_monolithic(s.op, f, opts);
    FAIL("expected solver_error");
  } catch (const solver_error& e) {
    CHECK(std::string(e.what()).find("stage 1") != std::string::npos);
  }
}

TEST_CASE("coercivity estimates match a dense eigensolve oracle on 15x15") {
  // unit square, h = 1/15, delta = 0.2 (m = 3)
  const Setup s = make_setup(0.2, 3);
  REQUIRE(s.disc->node_count() == 225);
  const Eigen::MatrixXd L = oracles::dense_operator(s.op);
  const int n = s.disc->node_count();

  const auto dense_lambda_min = [&](const std::vector<char>& mask) {
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
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    return es.eigenvalues().minCoeff();
  };

  const double poisson_oracle =
      dense_lambda_min(unknown_mask(*s.disc, CollarWidth::one_delta));
  const double poisson_est = estimate_coercivity(s.op, ProblemKind::poisson);
  CHECK(poisson_est > 0.0);
  CHECK(std::abs(poisson_est - poisson_oracle) <= 0.01 * poisson_oracle);

  const double hinged_oracle = std::min(
      poisson_oracle,
      dense_lambda_min(unknown_mask(*s.disc, CollarWidth::two_delta)));
  const double hinged_est =
      estimate_coercivity(s.op, ProblemKind::hinged_split);
  CHECK(hinged_est > 0.0);
  CHECK(std::abs(hinged_est - hinged_oracle) <= 0.01 * hinged_oracle);
  CHECK(estimate_coercivity(s.op, ProblemKind::hinged_monolithic) ==
        doctest::Approx(hinged_est).epsilon(1e-12));

  // clamped: composed form restricted to the 2-delta interior
  const auto mask2 = unknown_mask(*s.disc, CollarWidth::two_delta);
  std::vector<int> idx2;
  for (int i = 0; i < n; ++i) {
    if (mask2[i]) idx2.push_back(i);
  }
  Eigen::MatrixXd M(n, idx2.size());
  for (std::size_t k = 0; k < idx2.size(); ++k) M.col(k) = L.col(idx2[k]);
  const Eigen::MatrixXd B = M.transpose() * M;  // (L E)^T (L E)
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  const double clamped_oracle = es.eigenvalues().minCoeff();
  const double clamped_est = estimate_coercivity(s.op, ProblemKind::clamped);
  CHECK(clamped_est > 0.0);
  CHECK(std::abs(clamped_est - clamped_oracle) <= 0.01 * clamped_oracle);

  // order check from the coercivity chain: the clamped constant dominates
  // the squared Poisson constant divided by a Poincare-scale factor
  CHECK(clamped_est >= poisson_est * poisson_est / 100.0);
}

TEST_CASE("poisson coercivity is stable across the delta ladder at fixed m") {
  std::vector<double> estimates;
  for (const double delta : {0.2, 0.1, 0.05}) {
    const Setup s = make_setup(delta, 3);
    estimates.push_back(estimate_coercivity(s.op, ProblemKind::poisson));
    CHECK(estimates.back() > 0.0);
  }
  const double lo = *std::min_element(estimates.begin(), estimates.end());
  const double hi = *std::max_element(estimates.begin(), estimates.end());
  CHECK(hi / lo < 3.0);
}

TEST_CASE("poisson solve approaches the classical solution from above the "
          "collar") {
  // consistency of signs: f = Δu_exact gives u near u_exact in the interior
  const Setup s = make_setup(0.1, 5);
  const Field f = sample(s.disc, [](double x, double y) {
    return -2.0 * M_PI * M_PI * std::sin(M_PI * x) * std::sin(M_PI * y);
  });
  const SolveReport rep = solve_poisson(s.op, f, CollarWidth::one_delta, {});
  // center value within 20% of sin^2-peak 1 at this horizon
  int center = -1;
  double best = 1e9;
  for (int i = 0; i < s.disc->node_count(); ++i) {
    const Node& nd = s.disc->node(i);
    const double d2 = (nd.x - 0.5) * (nd.x - 0.5) + (nd.y - 0.5) * (nd.y - 0.5);
    if (d2 < best) {
      best = d2;
      center = i;
    }
  }
  CHECK(rep.solution.values[center] == doctest::Approx(1.0).epsilon(0.2));
  CHECK(rep.coercivity_estimate > 0.0);
}

TEST_CASE("direct clamped solve agrees with the matrix-free CG route") {
  const Setup s = make_setup(0.15, 6);  // 40x40 grid, within the direct cap
  const Field f = sample(s.disc, [](double, double) { return 64.0; });
  SolverOptions opts;
  opts.tol = 1e-12;
  const SolveReport cg = solve_clamped(s.op, f, opts);
  const SolveReport direct = solve_clamped_direct(s.op, f);
  const double scale = direct.solution.values.cwiseAbs().maxCoeff();
  CHECK((cg.solution.values - direct.solution.values).cwiseAbs().maxCoeff() <=
        1e-7 * scale);

  // the assembled composition matches two stencil applies
  const Eigen::SparseMatrix<double> B = assemble_biharmonic(s.op);
  std::mt19937_64 rng(71);
  const Field w =
      random_supported(s.disc, std::vector<char>(s.disc->node_count(), 1), rng);
  const Eigen::VectorXd via_matrix = B * w.values;
  const Eigen::VectorXd via_apply = apply_biharmonic(s.op, w).values;
  CHECK((via_matrix - via_apply).cwiseAbs().maxCoeff() <=
        1e-10 * via_apply.cwiseAbs().maxCoeff());

  // grids beyond 50x50 are refused
  const Setup big = make_setup(0.1, 6);
  CHECK_THROWS_AS(assemble_biharmonic(big.op), config_error);
}

TEST_CASE("jacobi preconditioning reaches the same solution") {
  const Setup s = make_setup(0.2, 4);
  const Field f = sample(s.disc, [](double x, double y) {
    return std::cos(M_PI * x) + y;
  });
  SolverOptions plain;
  SolverOptions jac;
  jac.jacobi = true;
  const auto a = solve_clamped(s.op, f, plain);
  const auto b = solve_clamped(s.op, f, jac);
  const double scale = a.solution.values.cwiseAbs().maxCoeff();
  CHECK((a.solution.values - b.solution.values).cwiseAbs().maxCoeff() <=
        100 * 1e-10 * scale);
}
