#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

#include "nlbiharm/analysis.hpp"
#include "nlbiharm/config.hpp"
#include "nlbiharm/errors.hpp"
#include "nlbiharm/quadrature.hpp"

using namespace nlbiharm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 12345;
  std::string quadrature = "ring_corrected";
  std::string out;
};

Config load_config(const CommonArgs& args) {
  Config cfg = args.config_path.empty() ? Config()
                                        : Config::parse_file(args.config_path);
  std::cout << "# resolved configuration\n";
  cfg.echo(std::cout);
  std::cout << "# quadrature = " << args.quadrature << "\n"
            << "# seed = " << args.seed << "\n\n";
  return cfg;
}

Field random_field(std::shared_ptr<const Discretization> disc,
                   std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Field f(disc);
  for (int i = 0; i < f.size(); ++i) f.values[i] = unif(rng);
  return f;
}

int cmd_kernel_check(const CommonArgs& args) {
  const Config cfg = load_config(args);
  const KernelSpec spec = cfg.kernel();
  const KernelScalars scalars = kernel_scalars(spec);

  // recompute the mollifier mass from the radial reduction
  const double mass =
      scalars.omega_dm1 *
      integrate_verified(
          [&spec](double r) {
            return rho(spec, r) * std::pow(r, spec.dim - 1);
          },
          0.0, spec.delta, 1e-10, 1e-13, 14);

  std::cout.precision(12);
  std::cout << "mollifier mass      = " << mass << "\n"
            << "C(delta)            = " << scalars.c_delta << "\n"
            << "sigma               = " << scalars.sigma << "\n"
            << "sigma * C(delta)    = " << scalars.sigma * scalars.c_delta
            << "\n"
            << "1/(2d)              = " << 1.0 / (2.0 * spec.dim) << "\n";

  const bool ok = std::abs(mass - 1.0) <= 1e-8 &&
                  std::abs(scalars.sigma * scalars.c_delta - 1.0) <= 1e-6;
  std::cout << (ok ? "kernel-check: PASS\n" : "kernel-check: FAIL\n");
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_identities(const CommonArgs& args, bool break_symmetry) {
  const Config cfg = load_config(args);
  const KernelSpec spec = cfg.kernel();
  const auto disc =
      Discretization::build(cfg.domain(), cfg.resolved_h(), spec.delta);
  NonlocalOperator op =
      assemble_laplacian(disc, spec, parse_quadrature(args.quadrature));
  if (break_symmetry) op.debug_break_symmetry();

  std::mt19937_64 rng(args.seed);
  const auto fail = [](const std::string& name, double value) {
    std::cout << "identities: FAIL (" << name << ", " << value << ")\n";
    return kExitCheckFailed;
  };

  // symmetry, bit-exact
  for (int i = 0; i < op.rows(); ++i) {
    const auto row = op.row(i);
    for (int k = 0; k < row.size; ++k) {
      const double wt = op.entry(row.cols[k], i);
      if (wt != row.weights[k]) {
        return fail("symmetry", std::abs(wt - row.weights[k]));
      }
    }
  }
  std::cout << "symmetry            : ok (bit-exact)\n";

  // null space: constants are annihilated exactly
  Field ones(disc);
  ones.values.setOnes();
  const double null_resid = apply(op, ones).values.cwiseAbs().maxCoeff();
  if (null_resid != 0.0) return fail("null-space", null_resid);
  std::cout << "null space          : ok (A*1 = 0)\n";

  // negative semidefiniteness and integration by parts on random pairs
  double worst_ibp = 0.0, worst_posdef = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Field u = random_field(disc, rng);
    const Field w = random_field(disc, rng);
    worst_ibp = std::max(worst_ibp, ibp_residual(op, u, w));
    const double quad =
        apply(op, u).values.dot(u.values) / u.values.squaredNorm();
    worst_posdef = std::max(worst_posdef, quad);
  }
  if (worst_posdef > 1e-12) return fail("semidefiniteness", worst_posdef);
  std::cout << "semidefiniteness    : ok (max <Au,u>/|u|^2 = " << worst_posdef
            << ")\n";
  if (worst_ibp > 1e-12) return fail("integration-by-parts", worst_ibp);
  std::cout << "integration by parts: ok (max relative residual = "
            << worst_ibp << ")\n";
  std::cout << "identities: PASS\n";
  return kExitOk;
}

void write_solution_csv(const std::string& path, const Discretization& disc,
                        const Field& u) {
  std::ofstream os(path);
  if (!os) throw config_error("cannot write '" + path + "'");
  os << "index,x,y,u\n";
  os.precision(12);
  for (int i = 0; i < disc.node_count(); ++i) {
    os << i << ',' << disc.node(i).x << ',' << disc.node(i).y << ','
       << u.values[i] << '\n';
  }
}

int cmd_solve(const CommonArgs& args) {
  const Config cfg = load_config(args);
  const KernelSpec spec = cfg.kernel();
  const auto disc =
      Discretization::build(cfg.domain(), cfg.resolved_h(), spec.delta);
  const NonlocalOperator op =
      assemble_laplacian(disc, spec, parse_quadrature(args.quadrature));
  const Field f = cfg.forcing(disc);

  if (!cfg.output_node_dump.empty()) {
    std::ofstream os(cfg.output_node_dump);
    if (!os) throw config_error("cannot write '" + cfg.output_node_dump + "'");
    disc->dump_nodes(os);
  }

  const std::string out =
      !args.out.empty() ? args.out
                        : (!cfg.output_csv.empty() ? cfg.output_csv
                                                   : std::string("solution.csv"));
  try {
    const SolveReport rep =
        solve(op, cfg.kind(), f, cfg.solver_options(), cfg.collar());
    write_solution_csv(out, *disc, rep.solution);
    std::cout << "solve: kind=" << to_string(cfg.kind())
              << " nodes=" << disc->node_count()
              << " iterations=" << rep.iterations
              << " residual=" << rep.residual
              << " coercivity~=" << rep.coercivity_estimate << "\n"
              << "solution written to " << out << "\n";
    return kExitOk;
  } catch (const solver_error& e) {
    const std::string hist_path = out + ".residuals.txt";
    std::ofstream os(hist_path);
    for (const double r : e.residual_history) os << r << '\n';
    std::cerr << "solver failure: " << e.what() << "\n"
              << "residual history written to " << hist_path << "\n";
    return kExitCheckFailed;
  }
}

int cmd_study(const CommonArgs& args) {
  const Config cfg = load_config(args);
  if (cfg.study_kind.empty()) {
    throw config_error("study.kind is required (pointwise_laplacian, "
                       "pointwise_biharmonic or solution)");
  }
  if (cfg.study_deltas.empty()) {
    throw config_error("study.deltas is required");
  }
  const int m = cfg.study_m.value_or(cfg.grid_m.value_or(6));
  const KernelFamily family = parse_kernel_family(cfg.kernel_family);
  const QuadratureScheme scheme = parse_quadrature(args.quadrature);
  const ManufacturedCase mc = ManufacturedCase::by_name(cfg.study_case);

  StudyResult result;
  if (cfg.study_kind == "pointwise_laplacian") {
    result = run_pointwise_laplacian_study(cfg.domain(), mc, cfg.study_deltas,
                                           m, family, scheme);
  } else if (cfg.study_kind == "pointwise_biharmonic") {
    result = run_pointwise_biharmonic_study(cfg.domain(), mc, cfg.study_deltas,
                                            m, family, scheme);
  } else if (cfg.study_kind == "solution") {
    result = run_solution_study(cfg.kind(), cfg.domain(), mc, cfg.study_deltas,
                                m, family, scheme, cfg.solver_options());
  } else {
    throw config_error("unknown study.kind '" + cfg.study_kind + "'");
  }

  write_study_csv(std::cout, result);
  const std::string out = !args.out.empty() ? args.out : cfg.output_csv;
  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) throw config_error("cannot write '" + out + "'");
    write_study_csv(os, result);
    std::cout << "study written to " << out << "\n";
  }
  if (!result.passed) {
    for (std::size_t k = 0; k < result.rows.size(); ++k) {
      if (k > 0 && result.rows[k].error_l2 >= result.rows[k - 1].error_l2) {
        std::cout << "first non-decreasing row: delta="
                  << result.rows[k].delta << "\n";
        break;
      }
    }
  }
  return result.passed ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal Laplacian/biharmonic operators, collar-constrained "
               "solves and convergence studies"};
  app.require_subcommand(1);

  CommonArgs args;
  app.add_option("--config", args.config_path, "configuration file");
  app.add_option("--seed", args.seed, "seed for random-field checks");
  app.add_option("--quadrature", args.quadrature,
                 "midpoint_skip or ring_corrected")
      ->check(CLI::IsMember({"midpoint_skip", "ring_corrected"}));
  app.add_option("--out", args.out, "output path (overrides output.csv)");

  auto* kernel_check =
      app.add_subcommand("kernel-check", "verify mollifier mass and scaling");
  auto* identities = app.add_subcommand(
      "identities", "verify operator symmetry, null space and energy identity");
  bool break_symmetry = false;
  identities
      ->add_flag("--break-symmetry", break_symmetry,
                 "deliberately corrupt one weight (test hook)")
      ->group("");
  auto* solve_cmd = app.add_subcommand("solve", "run one constrained solve");
  auto* study_cmd = app.add_subcommand("study", "run a convergence study");

  try {
    app.parse(argc, argv);
    if (kernel_check->parsed()) return cmd_kernel_check(args);
    if (identities->parsed()) return cmd_identities(args, break_symmetry);
    if (solve_cmd->parsed()) return cmd_solve(args);
    if (study_cmd->parsed()) return cmd_study(args);
    return kExitConfigError;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  } catch (const config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const solver_error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}
