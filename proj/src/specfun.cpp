// SPDX-License-Identifier: Apache-2.0
#include "nlyoung/specfun.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace nly::specfun {

GridSpec::GridSpec(double lo_, double hi_, int n_) : lo(lo_), hi(hi_), n(n_) {
  if (!(lo < hi))
    throw_error(ErrorKind::invalid_parameter, "GridSpec: lo must be < hi");
  if (n < 2) throw_error(ErrorKind::invalid_parameter, "GridSpec: n must be >= 2");
}

double kummer_m(double a, double b, double x) {
  if (b == 0.0 || (b < 0.0 && b == std::floor(b)))
    throw_error(ErrorKind::invalid_parameter,
                "kummer_m: b must not be zero or a negative integer (b=" +
                    std::to_string(b) + ")");
  double term = 1.0;
  double sum = 1.0;
  constexpr int kMaxTerms = 500;
  for (int k = 0; k < kMaxTerms; ++k) {
    term *= (a + k) * x / ((b + k) * (k + 1));
    sum += term;
    if (!std::isfinite(sum)) break;
    if (std::abs(term) < 1e-16 * std::abs(sum)) return sum;
  }
  throw_error(ErrorKind::non_convergence,
              "kummer_m: series did not converge within 500 terms");
}

double kummer_m_dx(double a, double b, double x) {
  return (a / b) * kummer_m(a + 1.0, b + 1.0, x);
}

double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

double find_smallest_root(const std::function<double(double)>& f, double lo,
                          double hi, int scan_steps, double tol) {
  if (scan_steps < 2)
    throw_error(ErrorKind::invalid_parameter,
                "find_smallest_root: scan_steps must be >= 2");
  if (!(tol > 0.0))
    throw_error(ErrorKind::invalid_parameter,
                "find_smallest_root: tol must be positive");

  const double step = (hi - lo) / scan_steps;
  double a = lo;
  double fa = f(a);
  for (int i = 1; i <= scan_steps; ++i) {
    const double b = (i == scan_steps) ? hi : lo + i * step;
    const double fb = f(b);
    if (fa == 0.0) return a;
    if (fa * fb <= 0.0) {
      double xa = a, xb = b, va = fa;
      while (xb - xa > tol) {
        const double m = 0.5 * (xa + xb);
        const double vm = f(m);
        if (va * vm <= 0.0) {
          xb = m;
        } else {
          xa = m;
          va = vm;
        }
      }
      return 0.5 * (xa + xb);
    }
    a = b;
    fa = fb;
  }
  throw_error(ErrorKind::no_root, "find_smallest_root: no sign change in bracket");
}

namespace {

// Simpson weights for n points / n-1 intervals (n odd).
double simpson_sum(const std::vector<double>& vals, double h) {
  const int n = static_cast<int>(vals.size());
  double sum = vals.front() + vals.back();
  for (int i = 1; i + 1 < n; ++i) sum += vals[i] * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

GridSpec force_odd(const GridSpec& g) {
  if (g.n % 2 == 1) return g;
  return GridSpec(g.lo, g.hi, g.n + 1);
}

}  // namespace

double integrate_1d(const std::function<double(double)>& f,
                    const GridSpec& grid) {
  const GridSpec g = force_odd(grid);
  std::vector<double> vals(g.n);
  for (int i = 0; i < g.n; ++i) vals[i] = f(g.point(i));
  return simpson_sum(vals, g.spacing());
}

double integrate_2d(const std::function<double(double, double)>& f,
                    const GridSpec& gx, const GridSpec& gy) {
  const GridSpec gxx = force_odd(gx);
  const GridSpec gyy = force_odd(gy);
  std::vector<double> rows(gxx.n);
  std::vector<double> vals(gyy.n);
  for (int i = 0; i < gxx.n; ++i) {
    const double x = gxx.point(i);
    for (int j = 0; j < gyy.n; ++j) vals[j] = f(x, gyy.point(j));
    rows[i] = simpson_sum(vals, gyy.spacing());
  }
  return simpson_sum(rows, gxx.spacing());
}

}  // namespace nly::specfun
