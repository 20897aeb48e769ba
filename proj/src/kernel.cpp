#include "nlbiharm/kernel.hpp"

#include <cmath>
#include <limits>

#include "nlbiharm/errors.hpp"
#include "nlbiharm/quadrature.hpp"

namespace nlbiharm {

namespace {

// Shape function g(t) on [0,1), before normalization: rho(r) = c/δ^d g(r/δ).
double shape(KernelFamily family, double t) {
  if (t >= 1.0) return 0.0;
  switch (family) {
    case KernelFamily::bump:
      return std::exp(-1.0 / (1.0 - t * t));
    case KernelFamily::polynomial: {
      const double s = 1.0 - t * t;
      return s * s * s * s;
    }
  }
  return 0.0;
}

}  // namespace

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "bump") return KernelFamily::bump;
  if (name == "polynomial") return KernelFamily::polynomial;
  throw config_error("unknown kernel family '" + name +
                     "' (expected bump or polynomial)");
}

std::string to_string(KernelFamily family) {
  return family == KernelFamily::bump ? "bump" : "polynomial";
}

double unit_sphere_measure(int dim) {
  // 2 pi^{d/2} / Gamma(d/2)
  return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
}

KernelSpec KernelSpec::make(KernelFamily family, double delta, int dim) {
  if (!(delta > 0.0)) throw config_error("kernel horizon delta must be > 0");
  if (dim < 2) throw config_error("kernel dimension must be >= 2");
  // Unit mass: omega_{d-1} c ∫_0^1 g(t) t^{d-1} dt = 1.
  const double moment = integrate_adaptive(
      [family, dim](double t) {
        return shape(family, t) * std::pow(t, dim - 1);
      },
      0.0, 1.0, 1e-13, 15);
  KernelSpec spec{family, delta, dim, 0.0};
  spec.c_norm = 1.0 / (unit_sphere_measure(dim) * moment);
  return spec;
}

double rho(const KernelSpec& spec, double r) {
  if (r < 0.0) throw config_error("rho: radius must be nonnegative");
  if (r >= spec.delta) return 0.0;
  return spec.c_norm * std::pow(spec.delta, -spec.dim) *
         shape(spec.family, r / spec.delta);
}

double mu(const KernelSpec& spec, double r) {
  if (r < 0.0) throw config_error("mu: radius must be nonnegative");
  if (r == 0.0) {
    throw numeric_error("mu is singular at r = 0; quadrature rules must "
                        "exclude the singular point",
                        std::numeric_limits<double>::infinity());
  }
  if (r >= spec.delta) return 0.0;
  return rho(spec, r) / (r * r);
}

double pi_of(const KernelSpec& spec, double r) {
  if (r < 0.0) throw config_error("pi_of: radius must be nonnegative");
  if (r >= spec.delta) return 0.0;
  // ∫_r^δ s mu(s) ds = ∫_r^δ rho(s)/s ds. Gauss-Kronrod nodes are interior,
  // so the s = 0 endpoint is never touched; for r = 0 the integral diverges
  // and the value saturates at the depth cap.
  return integrate_adaptive([&spec](double s) { return rho(spec, s) / s; }, r,
                            spec.delta, 1e-11, r == 0.0 ? 15 : 10);
}

double c_delta(const KernelSpec& spec) {
  const double omega = unit_sphere_measure(spec.dim);
  const double value = integrate_verified(
      [&spec](double r) {
        return pi_of(spec, r) * std::pow(r, spec.dim - 1);
      },
      0.0, spec.delta, 2e-9);
  return 0.5 * omega * value;
}

KernelScalars kernel_scalars(const KernelSpec& spec) {
  KernelScalars s{};
  s.sigma = 2.0 * spec.dim;
  s.c_delta = c_delta(spec);
  s.omega_dm1 = unit_sphere_measure(spec.dim);
  return s;
}

}  // namespace nlbiharm
