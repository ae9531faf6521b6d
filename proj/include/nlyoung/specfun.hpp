// SPDX-License-Identifier: Apache-2.0
//
// Special functions and numerical primitives: Kummer confluent
// hypergeometric function M(a,b,x), sinc, bracketed root finding and
// composite-Simpson quadrature on uniform grids.
#pragma once

#include <functional>

#include "nlyoung/errors.hpp"

namespace nly::specfun {

// Uniform 1D grid descriptor, lo < hi, n >= 2 points inclusive.
struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  int n = 2;

  GridSpec() = default;
  GridSpec(double lo_, double hi_, int n_);

  double spacing() const { return (hi - lo) / (n - 1); }
  double point(int i) const { return lo + i * spacing(); }
};

// Confluent hypergeometric M(a,b,x) by direct series summation.
// Term recurrence t_{k+1} = t_k (a+k) x / ((b+k)(k+1)); stops once
// |t| < 1e-16 |sum| or after 500 terms.  Arguments here stay small
// (the criterion-constant equation needs x = pi/2 only), so no
// asymptotic branch exists.
double kummer_m(double a, double b, double x);

// dM/dx = (a/b) M(a+1, b+1, x).
double kummer_m_dx(double a, double b, double x);

// sin(x)/x with a series branch below |x| < 1e-4.
double sinc(double x);

// Scans [lo,hi] in scan_steps uniform intervals, takes the leftmost
// sign change and bisects it down to a bracket of width <= tol.
// Throws ErrorKind::no_root when no sign change exists.
double find_smallest_root(const std::function<double(double)>& f, double lo,
                          double hi, int scan_steps = 10000,
                          double tol = 1e-12);

// Composite Simpson over the grid domain.  An even interval count is
// required by the rule; grids with an odd count are refined by one
// point (same domain).
double integrate_1d(const std::function<double(double)>& f,
                    const GridSpec& grid);
double integrate_2d(const std::function<double(double, double)>& f,
                    const GridSpec& gx, const GridSpec& gy);

}  // namespace nly::specfun
