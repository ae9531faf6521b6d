// SPDX-License-Identifier: Apache-2.0
#include "nlyoung/folding.hpp"

#include <cmath>
#include <memory>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nly::folding {

using states::Complex;

std::vector<Complex> slit_phase_table(const states::SlitPairState& state,
                                      const std::vector<double>& points,
                                      double hbar) {
  const int n = state.n();
  const auto idx = states::slit_indices(n);
  const double d = state.grating.d;
  std::vector<Complex> table(points.size() * n);
  for (size_t i = 0; i < points.size(); ++i)
    for (int k = 0; k < n; ++k)
      table[i * n + k] = std::exp(Complex(0.0, -points[i] * idx[k] * d / hbar));
  return table;
}

int effective_grid_per_cell(int requested, int n_slits) {
  int gpc = std::max(requested, 8 * (n_slits - 1));
  gpc = std::max(gpc, 8);
  if (gpc % 4) gpc += 4 - gpc % 4;
  return gpc;
}

namespace {

// Per-point Simpson weights times local-sawtooth powers.  Sawtooth
// discontinuities land on Simpson panel boundaries (gpc is a multiple
// of 4), where the point serves both flanking panels: the two sides
// contribute with opposite sawtooth signs, so the odd power cancels and
// the even power keeps (period/2)^2.
struct AxisWeights {
  std::vector<double> p;    // grid points
  std::vector<double> w0, w1, w2;
};

AxisWeights make_axis(int n_cells, int gpc, double period) {
  const int n_pts = n_cells * gpc + 1;
  const double half = 0.5 * n_cells * period;
  const double step = period / gpc;
  AxisWeights ax;
  ax.p.resize(n_pts);
  ax.w0.resize(n_pts);
  ax.w1.resize(n_pts);
  ax.w2.resize(n_pts);
  for (int i = 0; i < n_pts; ++i) {
    ax.p[i] = -half + i * step;
    double w = (i == 0 || i == n_pts - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    w *= step / 3.0;
    const double pb = modular::fold_modular(ax.p[i], period);
    // distance to the nearest sawtooth discontinuity (half-period line)
    const bool on_jump = std::abs(std::abs(pb) - 0.5 * period) < 1e-9 * period;
    ax.w0[i] = w;
    ax.w1[i] = on_jump ? 0.0 : w * pb;
    ax.w2[i] = on_jump ? w * 0.25 * period * period : w * pb * pb;
  }
  return ax;
}

}  // namespace

FoldResult fold_ptot_moments(const states::SlitPairState& state,
                             const modular::ModularFrame& frame,
                             const FoldOptions& opts,
                             const envelope::EnvelopeTable* table) {
  const int n = state.n();
  const double period = frame.momentum_period();
  const double hbar = frame.hbar();
  const int gpc = effective_grid_per_cell(opts.grid_per_cell, n);
  const int n_cells = std::max(opts.n_cells, 4);
  const int n_pts = n_cells * gpc + 1;

  const AxisWeights ax = make_axis(n_cells, gpc, period);
  const auto phases = slit_phase_table(state, ax.p, hbar);

  const double reach = n_cells * period;  // |s|,|r| can reach 2 * half
  std::unique_ptr<envelope::EnvelopeTable> own;
  if (!table) {
    own = std::make_unique<envelope::EnvelopeTable>(state, reach, reach, hbar,
                                                    opts.exec);
    table = own.get();
  }

  std::vector<double> row0(n_pts), row1(n_pts), row2(n_pts);

  auto run_row = [&](int i2) {
    // v_k = sum_j c_{kj} phase2_j
    std::vector<Complex> v(n, Complex(0.0, 0.0));
    for (int k = 0; k < n; ++k) {
      Complex acc(0.0, 0.0);
      for (int j = 0; j < n; ++j)
        acc += state.coeff(k, j) * phases[i2 * static_cast<size_t>(n) + j];
      v[k] = acc;
    }
    const double p2 = ax.p[i2];
    double r0 = 0.0, r1 = 0.0, r2 = 0.0;
    for (int i1 = 0; i1 < n_pts; ++i1) {
      Complex amp(0.0, 0.0);
      const Complex* ph1 = &phases[i1 * static_cast<size_t>(n)];
      for (int k = 0; k < n; ++k) amp += ph1[k] * v[k];
      const double p1 = ax.p[i1];
      const double rho = std::norm(amp) * table->density(p1 + p2, p1 - p2);
      r0 += ax.w0[i1] * rho;
      r1 += ax.w1[i1] * rho;
      r2 += ax.w2[i1] * rho;
    }
    row0[i2] = r0;
    row1[i2] = r1;
    row2[i2] = r2;
  };

  if (opts.exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i2 = 0; i2 < n_pts; ++i2) run_row(i2);
  } else {
    for (int i2 = 0; i2 < n_pts; ++i2) run_row(i2);
  }

  // Ordered reduction keeps results bit-identical across thread counts.
  double mass = 0.0, s1 = 0.0, s2 = 0.0;
  for (int i2 = 0; i2 < n_pts; ++i2) {
    mass += ax.w0[i2] * row0[i2];
    s1 += ax.w1[i2] * row0[i2] + ax.w0[i2] * row1[i2];
    s2 += ax.w2[i2] * row0[i2] + 2.0 * ax.w1[i2] * row1[i2] + ax.w0[i2] * row2[i2];
  }

  if (!(mass > 0.0) || mass < kCoverageFloor)
    throw_error(ErrorKind::insufficient_coverage,
                "fold_ptot_moments: tabulated grid encloses only " +
                    std::to_string(mass * 100.0) +
                    "% of the density mass; enlarge n_cells");

  FoldResult out;
  out.mean = s1 / mass;
  out.variance = s2 / mass - out.mean * out.mean;
  out.mass_enclosed = mass;
  out.grid_per_cell_used = gpc;
  out.n_cells_used = n_cells;
  return out;
}

}  // namespace nly::folding
