// SPDX-License-Identifier: Apache-2.0
//
// Numeric modular-moment folding: tabulates the joint momentum density
// |A|^2 |E|^2 on a (p1, p2) grid commensurate with the modular cell and
// accumulates moments of pbar(p1) + pbar(p2) with cell-aligned
// composite Simpson weights.  Works on truncated whole cells: the
// fringe-to-mass ratio is cell-local, so the renormalized moments are
// insensitive to the (hard-slit, slowly decaying) envelope tails.
#pragma once

#include <complex>
#include <vector>

#include "nlyoung/envelope.hpp"
#include "nlyoung/modular.hpp"
#include "nlyoung/states.hpp"

namespace nly::folding {

using envelope::Exec;

struct FoldOptions {
  int grid_per_cell = 64;  // raised to >= 8 (N-1), multiple of 4
  int n_cells = 24;        // cells per axis; half-width n_cells * h/(2d)
  Exec exec = Exec::parallel;
};

struct FoldResult {
  double variance = 0.0;
  double mean = 0.0;
  double mass_enclosed = 0.0;  // Parseval-normalized in-grid mass
  int grid_per_cell_used = 0;
  int n_cells_used = 0;
};

// Minimum tabulated density mass for a trustworthy fold; below this the
// grid misses envelope bulk, not just tails.
inline constexpr double kCoverageFloor = 0.70;

// Phase factors exp(-i p n_k d / hbar) for every grid point (row-major
// [point * N + k]).
std::vector<std::complex<double>> slit_phase_table(
    const states::SlitPairState& state, const std::vector<double>& points,
    double hbar);

// Per-cell resolution after the fringe-harmonic floor (8 points per
// highest harmonic) and the multiple-of-4 Simpson alignment.
int effective_grid_per_cell(int requested, int n_slits);

// Variance of pbar(p1) + pbar(p2) under the tabulated joint density of
// `state` (first moment computed and subtracted).  An external envelope
// table may be supplied to amortize sweeps that vary only the slit-pair
// coefficients; it must cover |s|,|r| <= n_cells * h/d.
FoldResult fold_ptot_moments(const states::SlitPairState& state,
                             const modular::ModularFrame& frame,
                             const FoldOptions& opts = {},
                             const envelope::EnvelopeTable* table = nullptr);

}  // namespace nly::folding
