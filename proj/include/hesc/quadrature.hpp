#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>

namespace hesc::quadrature {

// Adaptive 15-point Gauss-Kronrod. Either limit may be infinite. The
// tolerance is relative to the L1 norm of the integrand, with the same
// floor applied to the absolute error so tiny tails do not over-refine.
template <class F>
double integrate(F&& f, double a, double b, double tolerance = 1e-12, unsigned max_depth = 18) {
  if (a == b) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, tolerance, &error,
                                                                       &l1);
}

}  // namespace hesc::quadrature
