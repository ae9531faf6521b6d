// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles, independent of the library implementation paths
// they check.
#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "nlyoung/states.hpp"

namespace oracles {

// Extended-precision Kummer series, fixed 200 terms.
inline long double kummer_series_ld(long double a, long double b, long double x) {
  long double term = 1.0L, sum = 1.0L;
  for (int k = 0; k < 200; ++k) {
    term *= (a + k) * x / ((b + k) * (k + 1));
    sum += term;
  }
  return sum;
}

// Exact modular second moments of a slit-pair state from the lattice
// autocorrelation of its coefficient matrix.  Valid for disjoint slits
// (a < d): the envelope's Fourier transform vanishes at every nonzero
// lattice shift, so the sawtooth-series integrals collapse to finite
// sums over the autocorrelation
//   B_{jk} = sum_{nn'} c_{nn'} c_{n-j,n'-k},
//   <pbar_i^2> (d/h)^2 = 1/12 + sum_j (-1)^j B_{j0 or 0j} / (pi^2 j^2),
//   <pbar_1 pbar_2> (d/h)^2
//     = (1/2pi^2) sum_{j,k>=1} ((-1)^{j+k}/jk) (B_{j,-k} - B_{j,k}).
inline double lattice_variance_ptot(const nly::states::SlitPairState& state,
                                    double period) {
  const int n = state.n();
  const double pi = 3.14159265358979323846;
  auto B = [&](int j, int k) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        const int i2 = i - j, l2 = l - k;
        if (i2 < 0 || i2 >= n || l2 < 0 || l2 >= n) continue;
        sum += state.coeff(i, l) * state.coeff(i2, l2);
      }
    return sum;
  };
  double p1sq = 1.0 / 12.0, p2sq = 1.0 / 12.0, cross = 0.0;
  for (int j = 1; j < n; ++j) {
    const double sign = (j % 2) ? -1.0 : 1.0;
    p1sq += sign * B(j, 0) / (pi * pi * j * j);
    p2sq += sign * B(0, j) / (pi * pi * j * j);
  }
  for (int j = 1; j < n; ++j)
    for (int k = 1; k < n; ++k) {
      const double sign = ((j + k) % 2) ? -1.0 : 1.0;
      cross += sign / (static_cast<double>(j) * k) * (B(j, -k) - B(j, k));
    }
  cross /= 2.0 * pi * pi;
  return (p1sq + p2sq + 2.0 * cross) * period * period;
}

// Brute-force Var(n1 - n2) for independent uniform slit indices.
inline double uniform_pair_variance(int n) {
  double m1 = 0.0, m2 = 0.0;
  int count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = i - j;  // index offsets match centered indices
      m1 += v;
      m2 += v * v;
      ++count;
    }
  m1 /= count;
  m2 /= count;
  return m2 - m1 * m1;
}

}  // namespace oracles
