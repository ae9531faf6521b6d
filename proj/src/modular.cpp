// SPDX-License-Identifier: Apache-2.0
#include "nlyoung/modular.hpp"

#include <cmath>

#include "nlyoung/specfun.hpp"

namespace nly::modular {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.5772156649;
}  // namespace

ModularFrame::ModularFrame(double d_, double h_) : d(d_), h(h_) {
  if (!(d > 0.0) || !(h > 0.0))
    throw_error(ErrorKind::invalid_parameter, "ModularFrame: d and h must be positive");
}

double fold_modular(double value, double period) {
  double m = std::fmod(value + 0.5 * period, period);
  if (m < 0.0) m += period;
  // fmod can land exactly on `period` after the correction when value
  // sits a rounding step below a cell boundary.
  if (m >= period) m -= period;
  return m - 0.5 * period;
}

namespace {
ModularDecomposition decompose(double value, double period) {
  ModularDecomposition out;
  out.modular_part = fold_modular(value, period);
  out.integer_part =
      static_cast<std::int64_t>(std::llround((value - out.modular_part) / period));
  return out;
}
}  // namespace

ModularDecomposition decompose_position(double x, const ModularFrame& frame) {
  return decompose(x, frame.d);
}

ModularDecomposition decompose_momentum(double p, const ModularFrame& frame) {
  return decompose(p, frame.momentum_period());
}

double fringe_function(int n_slits, double xi) {
  if (n_slits < 1)
    throw_error(ErrorKind::invalid_parameter, "fringe_function: N must be >= 1");
  double sum = 1.0;
  for (int j = 1; j < n_slits; ++j)
    sum += 2.0 * (n_slits - j) / n_slits * std::cos(2.0 * kPi * j * xi);
  return sum;
}

double squeezing_s2(int n_slits) {
  if (n_slits < 1)
    throw_error(ErrorKind::invalid_parameter, "squeezing_s2: N must be >= 1");
  double sum = 0.0;
  for (int j = 1; j < n_slits; ++j)
    sum += static_cast<double>(n_slits - j) / (static_cast<double>(n_slits) * j * j);
  return 6.0 / (kPi * kPi) * sum;
}

double squeezing_s2_asymptotic(int n_slits) {
  if (n_slits < 1)
    throw_error(ErrorKind::invalid_parameter, "squeezing_s2_asymptotic: N must be >= 1");
  const double n = n_slits;
  return 1.0 - 6.0 * (1.0 + kEulerGamma + std::log(n)) / (kPi * kPi * n);
}

double squeezing_s2_shifted(int n_slits, double phi) {
  if (n_slits < 1)
    throw_error(ErrorKind::invalid_parameter, "squeezing_s2_shifted: N must be >= 1");
  double sum = 0.0;
  for (int j = 1; j < n_slits; ++j)
    sum += static_cast<double>(n_slits - j) /
           (static_cast<double>(n_slits) * j * j) * std::cos(j * phi);
  return 6.0 / (kPi * kPi) * sum;
}

double criterion_root_function(double mu) {
  // Chain rule on exp(-pi x^2) M(a, 1/2, 2 pi x^2) at x = 1/2:
  //   -2 pi x e^{-pi x^2} M + e^{-pi x^2} M'(a,1/2,2 pi x^2) * 4 pi x.
  const double a = -kPi * mu / 2.0 + 0.25;
  const double x = 0.5;
  const double arg = 2.0 * kPi * x * x;  // = pi/2
  const double damp = std::exp(-kPi * x * x);
  const double m = specfun::kummer_m(a, 0.5, arg);
  const double dm = specfun::kummer_m_dx(a, 0.5, arg);
  return -2.0 * kPi * x * damp * m + damp * dm * 4.0 * kPi * x;
}

double criterion_constant() {
  // Magic-static: initialized once, race-free.
  static const double cached = [] {
    return specfun::find_smallest_root(criterion_root_function, 1e-9, 0.5,
                                       10000, 1e-12);
  }();
  return cached;
}

CriterionReport evaluate_criterion(double var_ptot, double var_nrel,
                                   const ModularFrame& frame,
                                   double stderr_lhs) {
  if (var_ptot < 0.0 || var_nrel < 0.0)
    throw_error(ErrorKind::invalid_parameter,
                "evaluate_criterion: variances must be nonnegative");
  CriterionReport rep;
  const double dh = frame.d / frame.h;
  rep.lhs = dh * dh * var_ptot + var_nrel;
  rep.threshold = 2.0 * criterion_constant();
  rep.entangled = rep.lhs < rep.threshold;
  rep.lhs_stderr = stderr_lhs;
  return rep;
}

}  // namespace nly::modular
