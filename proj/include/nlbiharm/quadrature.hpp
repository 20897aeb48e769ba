#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "nlbiharm/errors.hpp"

namespace nlbiharm {

/// Adaptive Gauss-Kronrod (7-15) integration of f over [a, b]. Endpoints are
/// never evaluated, so integrable endpoint singularities are fine.
/// `tol` is a relative termination target; `max_depth` caps the adaptive
/// bisection. Tolerances below the estimator's round-off floor force the
/// subdivision to run to full depth, so both parameters stay modest.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-11,
                          int max_depth = 10) {
  namespace bmq = boost::math::quadrature;
  return bmq::gauss_kronrod<double, 15>::integrate(std::forward<F>(f), a, b,
                                                   max_depth, tol);
}

/// Integrates at two resolutions and uses their agreement as the achieved
/// tolerance; the built-in error estimate is too pessimistic to act on.
/// Throws numeric_error when the two values disagree beyond `required_abs`.
template <typename F>
double integrate_verified(F&& f, double a, double b, double required_abs,
                          double tol = 1e-11, int max_depth = 12) {
  const double coarse = integrate_adaptive(f, a, b, 10.0 * tol, max_depth - 2);
  const double fine = integrate_adaptive(f, a, b, tol, max_depth);
  const double achieved = std::abs(fine - coarse);
  if (!(achieved <= required_abs)) {
    throw numeric_error("quadrature did not converge", achieved);
  }
  return fine;
}

}  // namespace nlbiharm
