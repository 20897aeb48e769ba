#include "nlbiharm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "nlbiharm/errors.hpp"

namespace nlbiharm {

namespace {

// Central-difference check of the analytic Laplacian/bilaplacian closures at
// a few interior points. Guarded-relative tolerance 1e-6, FD step 1e-5.
void verify_derivatives(const ManufacturedCase& mc) {
  const double step = 1e-5;
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unif(0.2, 0.8);
  // five-point Laplacian stencil; the denominator step^2 amplifies round-off
  // of the samples by ~eps/step^2, which dominates for near-linear functions
  const auto check = [&](const std::function<double(double, double)>& f,
                         double exact, double x, double y, const char* what) {
    const double samples[5] = {f(x + step, y), f(x - step, y), f(x, y + step),
                               f(x, y - step), f(x, y)};
    const double fd = (samples[0] + samples[1] + samples[2] + samples[3] -
                       4.0 * samples[4]) /
                      (step * step);
    double amplitude = 0.0;
    for (const double s : samples) amplitude = std::max(amplitude, std::abs(s));
    const double noise_floor =
        64.0 * std::numeric_limits<double>::epsilon() * amplitude /
        (step * step);
    if (std::abs(fd - exact) >
        1e-6 * std::max(1.0, std::abs(exact)) + noise_floor) {
      throw numeric_error("manufactured case '" + mc.name + "': analytic " +
                              what + " disagrees with finite differences",
                          std::abs(fd - exact));
    }
  };
  for (int k = 0; k < 10; ++k) {
    const double x = unif(rng);
    const double y = unif(rng);
    check(mc.u, mc.lap_u(x, y), x, y, "Laplacian");
    check(mc.lap_u, mc.bilap_u(x, y), x, y, "bilaplacian");
  }
}

ManufacturedCase checked(ManufacturedCase mc) {
  verify_derivatives(mc);
  return mc;
}

}  // namespace

ManufacturedCase ManufacturedCase::constant() {
  return checked({"constant",
                  [](double, double) { return 1.0; },
                  [](double, double) { return 0.0; },
                  [](double, double) { return 0.0; }});
}

ManufacturedCase ManufacturedCase::linear() {
  return checked({"linear",
                  [](double x, double y) { return 0.75 * x - 1.25 * y + 0.5; },
                  [](double, double) { return 0.0; },
                  [](double, double) { return 0.0; }});
}

ManufacturedCase ManufacturedCase::quadratic() {
  return checked({"quadratic",
                  [](double x, double y) { return x * x + y * y; },
                  [](double, double) { return 4.0; },
                  [](double, double) { return 0.0; }});
}

ManufacturedCase ManufacturedCase::sine_square(int mx, int ny) {
  const double a = mx * M_PI;
  const double b = ny * M_PI;
  const double lap_factor = -(a * a + b * b);
  std::string name = "sine_square";
  if (mx != 1 || ny != 1) {
    name += "(" + std::to_string(mx) + "," + std::to_string(ny) + ")";
  }
  return checked(
      {name,
       [a, b](double x, double y) { return std::sin(a * x) * std::sin(b * y); },
       [a, b, lap_factor](double x, double y) {
         return lap_factor * std::sin(a * x) * std::sin(b * y);
       },
       [a, b, lap_factor](double x, double y) {
         return lap_factor * lap_factor * std::sin(a * x) * std::sin(b * y);
       }});
}

ManufacturedCase ManufacturedCase::clamped_disk() {
  return checked({"clamped_disk",
                  [](double x, double y) {
                    const double s = 1.0 - x * x - y * y;
                    return s * s;
                  },
                  [](double x, double y) {
                    return -8.0 + 16.0 * (x * x + y * y);
                  },
                  [](double, double) { return 64.0; }});
}

ManufacturedCase ManufacturedCase::by_name(const std::string& name) {
  if (name == "constant") return constant();
  if (name == "linear") return linear();
  if (name == "quadratic") return quadratic();
  if (name == "sine_square") return sine_square();
  if (name == "clamped_disk") return clamped_disk();
  throw config_error("unknown manufactured case '" + name + "'");
}

double l2_norm(const Discretization& disc, const Field& e, RegionMask region) {
  double s = 0.0;
  bool any = false;
  for (int i = 0; i < disc.node_count(); ++i) {
    if (!(region_bit(disc.node(i).label) & region)) continue;
    any = true;
    s += e.values[i] * e.values[i];
  }
  if (!any) throw config_error("l2_norm: region contains no nodes");
  return std::sqrt(disc.cell_volume() * s);
}

double linf_norm(const Discretization& disc, const Field& e,
                 RegionMask region) {
  double s = 0.0;
  bool any = false;
  for (int i = 0; i < disc.node_count(); ++i) {
    if (!(region_bit(disc.node(i).label) & region)) continue;
    any = true;
    s = std::max(s, std::abs(e.values[i]));
  }
  if (!any) throw config_error("linf_norm: region contains no nodes");
  return s;
}

double fit_order(const std::vector<StudyRow>& rows) {
  std::vector<double> lx, ly;
  for (const StudyRow& r : rows) {
    if (r.error_l2 > 0.0) {
      lx.push_back(std::log(r.delta));
      ly.push_back(std::log(r.error_l2));
    }
  }
  if (lx.size() < 3) {
    throw config_error("fit_order needs at least 3 rows with positive errors");
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sx += lx[k];
    sy += ly[k];
    sxx += lx[k] * lx[k];
    sxy += lx[k] * ly[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

std::vector<double> sorted_descending(std::vector<double> deltas) {
  if (deltas.empty()) throw config_error("study needs at least one delta");
  std::sort(deltas.rbegin(), deltas.rend());
  return deltas;
}

// Fit the order when possible and apply the pass rule shared by the two
// pointwise studies: slope within 90% of the target, or every error at the
// exactness floor. The floor has two regimes: 1e-8 of the field scale for
// cases the stencil reproduces exactly (round-off only), and 1% of the
// operator scale for quadrature-floor cases.
void finish_pointwise(StudyResult& result, double target, double op_scale,
                      double field_scale, double noise_scale) {
  result.target_order = target;
  bool fit_ok = false;
  try {
    result.fitted_order = fit_order(result.rows);
    fit_ok = true;
  } catch (const config_error&) {
    result.fitted_order = std::numeric_limits<double>::quiet_NaN();
  }
  const double floor =
      std::max({1e-2 * op_scale, 1e-8 * std::max(field_scale, 1e-30),
                64.0 * std::numeric_limits<double>::epsilon() * noise_scale});
  const bool at_floor =
      std::all_of(result.rows.begin(), result.rows.end(),
                  [&](const StudyRow& r) { return r.error_linf <= floor; });
  result.passed =
      at_floor || (fit_ok && result.fitted_order >= 0.9 * target);
  if (at_floor && !(fit_ok && result.fitted_order >= 0.9 * target)) {
    result.warning = "errors at exactness floor; fitted order not meaningful";
  }
}

}  // namespace

StudyResult run_pointwise_laplacian_study(const Domain& domain,
                                          const ManufacturedCase& mc,
                                          const std::vector<double>& deltas,
                                          int m, KernelFamily family,
                                          QuadratureScheme scheme) {
  StudyResult result;
  double op_scale = 0.0, field_scale = 0.0, noise_scale = 0.0;
  for (const double delta : sorted_descending(deltas)) {
    const double h = delta / m;
    const auto disc = Discretization::build(domain, h, delta);
    const KernelSpec spec = KernelSpec::make(family, delta, 2);
    const NonlocalOperator op = assemble_laplacian(disc, spec, scheme);
    const Field u = sample(disc, mc.u);
    const Field lu = apply(op, u);
    Field err(disc);
    for (int i = 0; i < disc->node_count(); ++i) {
      const Node& nd = disc->node(i);
      err.values[i] = lu.values[i] - mc.lap_u(nd.x, nd.y);
      op_scale = std::max(op_scale, std::abs(mc.lap_u(nd.x, nd.y)));
      field_scale = std::max(field_scale, std::abs(u.values[i]));
    }
    const RegionMask interior = kRegionInterior2d | kRegionCollarInner;
    result.rows.push_back(StudyRow{delta, h, m, l2_norm(*disc, err, interior),
                                   linf_norm(*disc, err, interior), 0});
    double diag_scale = 0.0;
    for (int i = 0; i < disc->node_count(); ++i) {
      diag_scale = std::max(diag_scale, std::abs(op.diagonal(i)));
    }
    noise_scale = std::max(noise_scale, field_scale * diag_scale);
  }
  finish_pointwise(result, 2.0, op_scale, field_scale, noise_scale);
  return result;
}

StudyResult run_pointwise_biharmonic_study(const Domain& domain,
                                           const ManufacturedCase& mc,
                                           const std::vector<double>& deltas,
                                           int m, KernelFamily family,
                                           QuadratureScheme scheme) {
  StudyResult result;
  double op_scale = 0.0, field_scale = 0.0, noise_scale = 0.0;
  for (const double delta : sorted_descending(deltas)) {
    const double h = delta / m;
    const auto disc = Discretization::build(domain, h, delta);
    const KernelSpec spec = KernelSpec::make(family, delta, 2);
    const NonlocalOperator op = assemble_laplacian(disc, spec, scheme);
    const Field u = sample(disc, mc.u);
    const Field bu = apply_biharmonic(op, u);
    Field err(disc);
    for (int i = 0; i < disc->node_count(); ++i) {
      const Node& nd = disc->node(i);
      err.values[i] = bu.values[i] - mc.bilap_u(nd.x, nd.y);
      op_scale = std::max(op_scale, std::abs(mc.bilap_u(nd.x, nd.y)));
      field_scale = std::max(field_scale, std::abs(u.values[i]));
    }
    result.rows.push_back(StudyRow{delta, h, m,
                                   l2_norm(*disc, err, kRegionInterior2d),
                                   linf_norm(*disc, err, kRegionInterior2d),
                                   0});
    double diag_scale = 0.0;
    for (int i = 0; i < disc->node_count(); ++i) {
      diag_scale = std::max(diag_scale, std::abs(op.diagonal(i)));
    }
    noise_scale =
        std::max(noise_scale, field_scale * diag_scale * diag_scale);
  }
  finish_pointwise(result, 1.0, op_scale, field_scale, noise_scale);
  return result;
}

StudyResult run_solution_study(ProblemKind kind, const Domain& domain,
                               const ManufacturedCase& mc,
                               const std::vector<double>& deltas, int m,
                               KernelFamily family, QuadratureScheme scheme,
                               const SolverOptions& opts) {
  StudyResult result;
  result.target_order = 0.0;  // qualitative; fitted order is report-only
  double exact_norm = 0.0;
  for (const double delta : sorted_descending(deltas)) {
    const double h = delta / m;
    const auto disc = Discretization::build(domain, h, delta);
    const KernelSpec spec = KernelSpec::make(family, delta, 2);
    const NonlocalOperator op = assemble_laplacian(disc, spec, scheme);
    const Field f = sample(
        disc, kind == ProblemKind::poisson ? mc.lap_u : mc.bilap_u);
    const SolveReport rep = solve(op, kind, f, opts, CollarWidth::one_delta);
    Field err(disc);
    for (int i = 0; i < disc->node_count(); ++i) {
      const Node& nd = disc->node(i);
      err.values[i] = rep.solution.values[i] - mc.u(nd.x, nd.y);
    }
    result.rows.push_back(StudyRow{delta, h, m, l2_norm(*disc, err),
                                   linf_norm(*disc, err), rep.iterations});
    exact_norm = l2_norm(*disc, sample(disc, mc.u));
  }

  bool decreasing = true;
  for (std::size_t k = 1; k < result.rows.size(); ++k) {
    decreasing = decreasing &&
                 result.rows[k].error_l2 < result.rows[k - 1].error_l2;
  }
  const bool final_ok =
      result.rows.back().error_l2 <= 0.05 * exact_norm;
  result.passed = decreasing && final_ok;
  if (!decreasing && final_ok) {
    result.warning = "errors not strictly decreasing across the delta ladder";
  }
  try {
    result.fitted_order = fit_order(result.rows);
  } catch (const config_error&) {
    result.fitted_order = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

void write_study_csv(std::ostream& os, const StudyResult& result) {
  os << "delta,h,m,error_l2,error_linf,iterations\n";
  os.precision(12);
  for (const StudyRow& r : result.rows) {
    os << r.delta << ',' << r.h << ',' << r.m << ',' << r.error_l2 << ','
       << r.error_linf << ',' << r.iterations << '\n';
  }
  os << "# fitted_order=" << result.fitted_order << '\n';
  os << "# target_order=" << result.target_order << '\n';
  os << "# passed=" << (result.passed ? "true" : "false") << '\n';
  if (!result.warning.empty()) os << "# warning=" << result.warning << '\n';
}

}  // namespace nlbiharm
