#pragma once

#include <string>

namespace nlbiharm {

enum class KernelFamily {
  bump,        // c δ^{-d} exp(-1/(1-(r/δ)²)), smooth, non-increasing
  polynomial,  // c δ^{-d} (1-(r/δ)²)^4, C³ at the support edge
};

KernelFamily parse_kernel_family(const std::string& name);
std::string to_string(KernelFamily family);

/// Radial compactly-supported mollifier: rho(r) >= 0, rho(r) = 0 for r >= delta,
/// and ∫_{R^d} rho(|x|) dx = 1. The normalization constant is fixed at
/// construction by radial quadrature.
struct KernelSpec {
  KernelFamily family;
  double delta;   // interaction horizon, > 0
  int dim;        // spatial dimension, >= 2
  double c_norm;  // dimensionless normalization (mollifier has unit mass)

  static KernelSpec make(KernelFamily family, double delta, int dim);
};

/// Surface measure of the unit sphere in R^d (2π for d=2, 4π for d=3).
double unit_sphere_measure(int dim);

/// Mollifier value rho_delta(r); exactly 0 for r >= delta. Throws on r < 0.
double rho(const KernelSpec& spec, double r);

/// Singular kernel mu_delta(r) = rho_delta(r) / r². Throws on r <= 0: the
/// r = 0 singularity must be handled by the caller's quadrature rule.
double mu(const KernelSpec& spec, double r);

/// pi_delta(r) = ∫_r^delta s mu(s) ds, by adaptive quadrature. Non-increasing,
/// pi(delta) = 0. Diverges logarithmically as r -> 0 when rho(0) > 0; at r = 0
/// the returned value saturates at the quadrature subdivision depth.
double pi_of(const KernelSpec& spec, double r);

/// C(delta) = (ω_{d-1}/2) ∫_0^delta pi(r) r^{d-1} dr by nested adaptive
/// quadrature. Equals 1/(2d) for every admissible mollifier and horizon.
double c_delta(const KernelSpec& spec);

/// Scalars derived from a kernel: the operator scaling sigma = 2d = C(delta)^{-1},
/// the quadrature estimate of C(delta), and the unit-sphere measure.
struct KernelScalars {
  double sigma;
  double c_delta;
  double omega_dm1;
};

KernelScalars kernel_scalars(const KernelSpec& spec);

}  // namespace nlbiharm
