// SPDX-License-Identifier: Apache-2.0
//
// Post-measurement pipeline: modular moments and variances estimated
// from raw event records, phase-origin optimization, and criterion
// evaluation with bootstrap uncertainties.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nlyoung/modular.hpp"
#include "nlyoung/sampler.hpp"

namespace nly::analysis {

using sampler::EventRecord;
using sampler::FarFieldMeta;
using sampler::Plane;

enum class Observable { n_x_rel, p_bar_tot };

struct EstimatedMoments {
  Observable observable = Observable::n_x_rel;
  double m1 = 0.0;
  double m2 = 0.0;
  double variance = 0.0;         // m2 - m1^2, clamped at 0
  double stderr_variance = 0.0;  // bootstrap, 200 resamples
  std::int64_t n_events = 0;
};

struct HistogramRow {
  double center = 0.0;
  std::int64_t count = 0;
  double density = 0.0;
};

struct FringeHistogram {
  std::vector<HistogramRow> rows;
  double visibility = 0.0;       // (max-min)/(max+min), central 3 periods
  double dominant_period = 0.0;  // Fourier-peak estimate
};

enum class HistogramAxis { sum, single1, single2 };

// Sample moments of N_x(u1) - N_x(u2) over near-plane events.
EstimatedMoments estimate_nrel_moments(std::span<const EventRecord> events,
                                       const modular::ModularFrame& frame,
                                       int m_max = 2);

// Sample moments of pbar(p1) + pbar(p2) over far-plane events after the
// phase-origin shift phi (a coordinate offset phi h / (2 pi d) split
// evenly over p1 + p2).  Screen-coordinate events require far-field
// metadata to invert x -> p = m x / t2.
EstimatedMoments estimate_ptot_moments(
    std::span<const EventRecord> events, const modular::ModularFrame& frame,
    int m_max = 2, double phi = 0.0,
    const std::optional<FarFieldMeta>& meta = std::nullopt);

// Phase origin minimizing the estimated pbar_tot variance: coarse
// 360-point scan refined by golden section to 1e-4, folded to [0,2pi).
double fit_phase(std::span<const EventRecord> events,
                 const modular::ModularFrame& frame,
                 const std::optional<FarFieldMeta>& meta = std::nullopt);

// Combines both planes into the criterion report; the lhs standard
// error combines the two bootstrap errors in quadrature.
modular::CriterionReport criterion_from_events(
    std::span<const EventRecord> near_events,
    std::span<const EventRecord> far_events,
    const modular::ModularFrame& frame, bool auto_phase = false,
    const std::optional<FarFieldMeta>& meta = std::nullopt);

// Histogram over the chosen axis with density normalization, fringe
// visibility over the central three periods, and the dominant period
// from a discrete Fourier peak.
FringeHistogram fringe_histogram(std::span<const EventRecord> events,
                                 HistogramAxis axis, int bins,
                                 const modular::ModularFrame& frame);

// |sum_k exp(i omega u_k)|^2 / n at the grating frequency
// omega = 2 pi d / h for single-axis momenta; ~Exp(1) under a
// structureless marginal, so values below ~9 are consistent with no
// fringe at the 3 sigma level.
double grating_frequency_power(std::span<const EventRecord> events,
                               HistogramAxis axis,
                               const modular::ModularFrame& frame,
                               const std::optional<FarFieldMeta>& meta = std::nullopt);

}  // namespace nly::analysis
