// SPDX-License-Identifier: Apache-2.0
#include "nlyoung/envelope.hpp"

#include <algorithm>
#include <cmath>

#include "nlyoung/specfun.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nly::envelope {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Catmull-Rom weights for fractional position t in [0,1].
inline void cubic_weights(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
  w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
  w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}
}  // namespace

EnvelopeTable::EnvelopeTable(const states::SlitPairState& state, double s_half,
                             double r_half, double hbar, Exec exec) {
  const double a = state.grating.a;
  const double sigma = state.sigma_rel_eff;
  const std::complex<double> xi = state.xi_rel;

  const double sinc_scale = 2.0 * kPi * hbar / a;
  const double gauss_scale = 2.0 * hbar / sigma;
  step_ = std::min(sinc_scale, gauss_scale) / 16.0;

  s_half_ = s_half;
  r_half_ = r_half;
  const double margin = 4.0 * step_;
  s0_ = -(s_half + margin);
  r0_ = -(r_half + margin);
  ns_ = static_cast<int>(std::ceil(2.0 * (s_half + margin) / step_)) + 1;
  nr_ = static_cast<int>(std::ceil(2.0 * (r_half + margin) / step_)) + 1;
  values_.assign(static_cast<size_t>(ns_) * nr_, 0.0);

  // Gaussian kernel G(y) = exp(-xi (y sigma / 2 hbar)^2) truncated where
  // |G| < 1e-14 (|y| > 12 hbar / sigma).
  const double y_half = 12.0 * hbar / sigma;
  const int nk = static_cast<int>(std::ceil(y_half / step_));
  std::vector<std::complex<double>> kernel(2 * nk + 1);
  for (int k = -nk; k <= nk; ++k) {
    const double g = (k * step_) * sigma / (2.0 * hbar);
    kernel[k + nk] = std::exp(-xi * (g * g));
  }

  const std::complex<double> pref =
      states::envelope_prefactor(a, sigma, xi, hbar);
  const double pref2 = std::norm(pref);

  // The integration variable pt runs over the r range extended by the
  // kernel half width; it shares the table spacing so each output row
  // is a plain discrete convolution.
  const int npt = nr_ + 2 * nk;
  const double pt0 = r0_ - nk * step_;

  auto run_row = [&](int is) {
    const double s = s0_ + is * step_;
    std::vector<double> ksinc(npt);
    for (int k = 0; k < npt; ++k) {
      const double pt = pt0 + k * step_;
      ksinc[k] = specfun::sinc((s + pt) * a / (2.0 * hbar)) *
                 specfun::sinc((s - pt) * a / (2.0 * hbar));
    }
    for (int ir = 0; ir < nr_; ++ir) {
      std::complex<double> acc(0.0, 0.0);
      // pt index of r - y: r at (ir + nk) on the pt grid.
      const int base = ir + 2 * nk;
      for (int k = 0; k < 2 * nk + 1; ++k)
        acc += ksinc[base - k] * kernel[k];
      acc *= step_;
      values_[is * static_cast<size_t>(nr_) + ir] = pref2 * std::norm(acc);
    }
  };

  if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int is = 0; is < ns_; ++is) run_row(is);
  } else {
    for (int is = 0; is < ns_; ++is) run_row(is);
  }
}

double EnvelopeTable::density(double s, double r) const {
  const double fs = (s - s0_) / step_;
  const double fr = (r - r0_) / step_;
  const int is = static_cast<int>(std::floor(fs));
  const int ir = static_cast<int>(std::floor(fr));
  if (is < 1 || is > ns_ - 3 || ir < 1 || ir > nr_ - 3) return 0.0;

  double ws[4], wr[4];
  cubic_weights(fs - is, ws);
  cubic_weights(fr - ir, wr);
  double out = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double* row = &values_[(is - 1 + i) * static_cast<size_t>(nr_)];
    double acc = 0.0;
    for (int j = 0; j < 4; ++j) acc += wr[j] * row[ir - 1 + j];
    out += ws[i] * acc;
  }
  return out > 0.0 ? out : 0.0;
}

double EnvelopeTable::enclosed_mass(double s_lim, double r_lim) const {
  double sum = 0.0;
  for (int is = 0; is < ns_; ++is) {
    const double s = s0_ + is * step_;
    if (std::abs(s) > s_lim) continue;
    const double edge_s = (is == 0 || is == ns_ - 1) ? 0.5 : 1.0;
    for (int ir = 0; ir < nr_; ++ir) {
      const double r = r0_ + ir * step_;
      if (std::abs(r) > r_lim) continue;
      const double edge_r = (ir == 0 || ir == nr_ - 1) ? 0.5 : 1.0;
      sum += edge_s * edge_r * at(is, ir);
    }
  }
  // dp1 dp2 = ds dr / 2.
  return 0.5 * sum * step_ * step_;
}

}  // namespace nly::envelope
