// SPDX-License-Identifier: Apache-2.0
#include "nlyoung/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include "nlyoung/rng.hpp"

namespace nly::analysis {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kBootstrapResamples = 200;
constexpr std::uint64_t kBootstrapSeed = 0x626f6f7473ULL;  // "boots"

void require_plane(std::span<const EventRecord> events, Plane plane,
                   const char* who) {
  if (events.empty())
    throw_error(ErrorKind::empty_input, std::string(who) + ": no events");
  for (const auto& ev : events)
    if (ev.plane != plane)
      throw_error(ErrorKind::wrong_plane,
                  std::string(who) + ": event from the wrong detection plane");
}

struct MomentAccumulator {
  double m1 = 0.0, m2 = 0.0;
  std::int64_t n = 0;
  void add(double v) {
    m1 += v;
    m2 += v * v;
    ++n;
  }
  double mean() const { return m1 / n; }
  double variance() const {
    const double mu = mean();
    return std::max(0.0, m2 / n - mu * mu);
  }
};

// Bootstrap standard error of the variance of a sample.
double bootstrap_variance_stderr(const std::vector<double>& values) {
  const std::int64_t n = static_cast<std::int64_t>(values.size());
  if (n < 2) return 0.0;
  double sum = 0.0, sum2 = 0.0;
  for (int rep = 0; rep < kBootstrapResamples; ++rep) {
    rng::EventRng r(kBootstrapSeed, 0, static_cast<std::uint64_t>(rep));
    MomentAccumulator acc;
    for (std::int64_t i = 0; i < n; ++i) {
      const auto j = static_cast<std::int64_t>(r.uniform() * n);
      acc.add(values[std::min(j, n - 1)]);
    }
    const double v = acc.variance();
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / kBootstrapResamples;
  return std::sqrt(std::max(0.0, sum2 / kBootstrapResamples - mean * mean));
}

std::vector<double> far_momenta_sum_folded(std::span<const EventRecord> events,
                                           const modular::ModularFrame& frame,
                                           double phi,
                                           const std::optional<FarFieldMeta>& meta) {
  const double shift = 0.5 * phi * frame.h / (2.0 * kPi * frame.d);
  double scale = 1.0;
  if (meta && meta->t2 > 0.0) scale = meta->mass / meta->t2;
  std::vector<double> vals;
  vals.reserve(events.size());
  for (const auto& ev : events) {
    const double p1 = ev.u1 * scale + shift;
    const double p2 = ev.u2 * scale + shift;
    vals.push_back(modular::decompose_momentum(p1, frame).modular_part +
                   modular::decompose_momentum(p2, frame).modular_part);
  }
  return vals;
}

}  // namespace

EstimatedMoments estimate_nrel_moments(std::span<const EventRecord> events,
                                       const modular::ModularFrame& frame,
                                       int m_max) {
  require_plane(events, Plane::near, "estimate_nrel_moments");
  if (events.size() < 2)
    throw_error(ErrorKind::empty_input,
                "estimate_nrel_moments: need at least two events");
  (void)m_max;
  std::vector<double> vals;
  vals.reserve(events.size());
  for (const auto& ev : events) {
    const auto d1 = modular::decompose_position(ev.u1, frame);
    const auto d2 = modular::decompose_position(ev.u2, frame);
    vals.push_back(static_cast<double>(d1.integer_part - d2.integer_part));
  }
  MomentAccumulator acc;
  for (double v : vals) acc.add(v);
  EstimatedMoments out;
  out.observable = Observable::n_x_rel;
  out.m1 = acc.mean();
  out.m2 = acc.m2 / acc.n;
  out.variance = acc.variance();
  out.stderr_variance = bootstrap_variance_stderr(vals);
  out.n_events = acc.n;
  return out;
}

EstimatedMoments estimate_ptot_moments(std::span<const EventRecord> events,
                                       const modular::ModularFrame& frame,
                                       int m_max, double phi,
                                       const std::optional<FarFieldMeta>& meta) {
  require_plane(events, Plane::far, "estimate_ptot_moments");
  if (events.size() < 2)
    throw_error(ErrorKind::empty_input,
                "estimate_ptot_moments: need at least two events");
  (void)m_max;
  const auto vals = far_momenta_sum_folded(events, frame, phi, meta);
  MomentAccumulator acc;
  for (double v : vals) acc.add(v);
  EstimatedMoments out;
  out.observable = Observable::p_bar_tot;
  out.m1 = acc.mean();
  out.m2 = acc.m2 / acc.n;
  out.variance = acc.variance();
  out.stderr_variance = bootstrap_variance_stderr(vals);
  out.n_events = acc.n;
  return out;
}

double fit_phase(std::span<const EventRecord> events,
                 const modular::ModularFrame& frame,
                 const std::optional<FarFieldMeta>& meta) {
  require_plane(events, Plane::far, "fit_phase");
  if (events.size() < 100)
    throw_error(ErrorKind::insufficient_events,
                "fit_phase: need at least 100 events");

  auto variance_at = [&](double phi) {
    const auto vals = far_momenta_sum_folded(events, frame, phi, meta);
    MomentAccumulator acc;
    for (double v : vals) acc.add(v);
    return acc.variance();
  };

  constexpr int kGrid = 360;
  double best_phi = 0.0, best_var = variance_at(0.0);
  for (int i = 1; i < kGrid; ++i) {
    const double phi = 2.0 * kPi * i / kGrid;
    const double v = variance_at(phi);
    if (v < best_var) {
      best_var = v;
      best_phi = phi;
    }
  }

  // Golden-section refinement on the bracketing grid interval.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best_phi - 2.0 * kPi / kGrid;
  double hi = best_phi + 2.0 * kPi / kGrid;
  double x1 = hi - gr * (hi - lo);
  double x2 = lo + gr * (hi - lo);
  double f1 = variance_at(x1), f2 = variance_at(x2);
  while (hi - lo > 1e-4) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = variance_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = variance_at(x2);
    }
  }
  double phi = 0.5 * (lo + hi);
  phi = std::fmod(phi, 2.0 * kPi);
  if (phi < 0.0) phi += 2.0 * kPi;
  return phi;
}

modular::CriterionReport criterion_from_events(
    std::span<const EventRecord> near_events,
    std::span<const EventRecord> far_events,
    const modular::ModularFrame& frame, bool auto_phase,
    const std::optional<FarFieldMeta>& meta) {
  const auto nrel = estimate_nrel_moments(near_events, frame);
  const double phi = auto_phase ? fit_phase(far_events, frame, meta) : 0.0;
  const auto ptot = estimate_ptot_moments(far_events, frame, 2, phi, meta);
  const double dh = frame.d / frame.h;
  const double se = std::hypot(dh * dh * ptot.stderr_variance, nrel.stderr_variance);
  return modular::evaluate_criterion(ptot.variance, nrel.variance, frame, se);
}

FringeHistogram fringe_histogram(std::span<const EventRecord> events,
                                 HistogramAxis axis, int bins,
                                 const modular::ModularFrame& frame) {
  (void)frame;
  if (bins < 8)
    throw_error(ErrorKind::invalid_parameter, "fringe_histogram: bins >= 8");
  if (events.empty())
    throw_error(ErrorKind::empty_input, "fringe_histogram: no events");

  std::vector<double> vals;
  vals.reserve(events.size());
  for (const auto& ev : events) {
    switch (axis) {
      case HistogramAxis::sum: vals.push_back(ev.u1 + ev.u2); break;
      case HistogramAxis::single1: vals.push_back(ev.u1); break;
      case HistogramAxis::single2: vals.push_back(ev.u2); break;
    }
  }
  // Symmetric range from the 0.5% / 99.5% quantiles.
  std::vector<double> sorted(vals);
  std::sort(sorted.begin(), sorted.end());
  const auto q = [&](double f) {
    return sorted[std::min(sorted.size() - 1,
                           static_cast<size_t>(f * sorted.size()))];
  };
  const double lim = std::max(std::abs(q(0.005)), std::abs(q(0.995)));
  const double lo = -lim, hi = lim;
  const double bw = (hi - lo) / bins;

  FringeHistogram out;
  out.rows.resize(bins);
  for (int b = 0; b < bins; ++b) {
    out.rows[b].center = lo + (b + 0.5) * bw;
  }
  std::int64_t in_range = 0;
  for (double v : vals) {
    const int b = static_cast<int>((v - lo) / bw);
    if (b >= 0 && b < bins) {
      ++out.rows[b].count;
      ++in_range;
    }
  }
  for (auto& row : out.rows)
    row.density = in_range ? row.count / (in_range * bw) : 0.0;

  // Dominant period by discrete Fourier magnitude over the binned
  // density, DC excluded; parabolic refinement around the peak.
  // Frequencies below ~6 periods per range belong to the envelope, not
  // the fringes; the envelope transform is compactly supported there.
  const int n_freq = 4096;
  const double w_min = 6.0 * (2.0 * kPi) / (hi - lo);
  const double w_max = kPi / bw * 0.9;
  double best_w = w_min, best_mag = -1.0;
  std::vector<double> mags(n_freq);
  for (int k = 0; k < n_freq; ++k) {
    const double w = w_min + (w_max - w_min) * k / (n_freq - 1);
    std::complex<double> acc(0.0, 0.0);
    for (const auto& row : out.rows)
      acc += row.density * std::exp(std::complex<double>(0.0, w * row.center));
    mags[k] = std::abs(acc);
    if (mags[k] > best_mag) {
      best_mag = mags[k];
      best_w = w;
    }
  }
  // parabolic peak interpolation
  const int kbest = static_cast<int>((best_w - w_min) / (w_max - w_min) * (n_freq - 1));
  if (kbest > 0 && kbest < n_freq - 1) {
    const double y0 = mags[kbest - 1], y1 = mags[kbest], y2 = mags[kbest + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    if (std::abs(denom) > 1e-300) {
      const double delta = 0.5 * (y0 - y2) / denom;
      best_w += delta * (w_max - w_min) / (n_freq - 1);
    }
  }
  out.dominant_period = 2.0 * kPi / best_w;

  // Visibility over the central three fringe periods.
  const double window = 1.5 * out.dominant_period;
  double vmax = 0.0, vmin = std::numeric_limits<double>::max();
  for (const auto& row : out.rows) {
    if (std::abs(row.center) > window) continue;
    vmax = std::max(vmax, row.density);
    vmin = std::min(vmin, row.density);
  }
  if (vmax > 0.0 && vmin <= vmax)
    out.visibility = (vmax - vmin) / (vmax + vmin);
  return out;
}

double grating_frequency_power(std::span<const EventRecord> events,
                               HistogramAxis axis,
                               const modular::ModularFrame& frame,
                               const std::optional<FarFieldMeta>& meta) {
  if (events.empty())
    throw_error(ErrorKind::empty_input, "grating_frequency_power: no events");
  double scale = 1.0;
  if (meta && meta->t2 > 0.0) scale = meta->mass / meta->t2;
  const double omega = 2.0 * kPi * frame.d / frame.h;  // grating frequency
  std::complex<double> acc(0.0, 0.0);
  for (const auto& ev : events) {
    double v = 0.0;
    switch (axis) {
      case HistogramAxis::sum: v = ev.u1 + ev.u2; break;
      case HistogramAxis::single1: v = ev.u1; break;
      case HistogramAxis::single2: v = ev.u2; break;
    }
    acc += std::exp(std::complex<double>(0.0, omega * v * scale));
  }
  return std::norm(acc) / static_cast<double>(events.size());
}

}  // namespace nly::analysis
