// SPDX-License-Identifier: Apache-2.0
//
// Analytic and numeric moments of the modular observables, robustness
// thresholds, and the critical-uncertainty sweeps.
#pragma once

#include <vector>

#include "nlyoung/folding.hpp"
#include "nlyoung/modular.hpp"
#include "nlyoung/states.hpp"

namespace nly::observables {

enum class Observable { n_x_rel, p_bar_tot };

struct MomentSet {
  Observable observable = Observable::n_x_rel;
  std::vector<std::pair<int, double>> moments;  // (order, value)
  double variance = 0.0;                        // m2 - m1^2, clamped at 0
};

// Ideal MME: Var(pbar_tot) = (h^2 / 6 d^2) (1 - S2(N)).
double ideal_variance_ptot(int n_slits, const modular::ModularFrame& frame);

// Shifted pattern: (h^2 / 6 d^2) (1 - S2(N, phi)).
double ideal_variance_ptot_shifted(int n_slits, double phi,
                                   const modular::ModularFrame& frame);

// Classical admixture w: (h^2 / 6 d^2) [1 - (1-w) S2(N)].
double mixture_variance_ptot(int n_slits, double w,
                             const modular::ModularFrame& frame);

// w_crit = (12 C - 1)/S2(N) + 1, clamped to [0,1]; 0.79 for N = 2.
double classical_admixture_threshold(int n_slits);

// Separable product state: Var(N_x,rel) = (N^2 - 1)/6.
double separable_variance_nrel(int n_slits);

// N_rel-only bound for the separable admixture: 4C (about 0.31).
double separable_admixture_threshold();

// Full-mixture threshold: solves lhs(w) = 2C with
//   lhs(w) = (d^2/h^2)[(1-w) Var_mme + w Var_sep] + w (N^2-1)/6,
// where Var_sep comes from a numeric 1D modular fold of the separable
// single-particle momentum density sinc^2(p a / 2 hbar) F_N(p d / h).
double separable_admixture_threshold_numeric(int n_slits,
                                             const states::GratingSpec& g,
                                             const modular::ModularFrame& frame);

// Numeric Var(pbar_tot) of the separable product state (two independent
// single-particle multislit states); exposed for the threshold report.
double separable_variance_ptot_numeric(int n_slits, const states::GratingSpec& g,
                                       const modular::ModularFrame& frame);

// Phase-averaged ensemble: (h^2/6d^2)[1 - exp(-(s0_p_cm d)^2 /
// (2 h^2 |xi_cm|^2)) S2(N)].
double extended_source_variance_ptot(int n_slits,
                                     const modular::ModularFrame& frame,
                                     double s0_p_cm, double xi_cm_mag);

// Exact moments of N_x,rel from the coefficient matrix (slits are
// disjoint, so the weights are |c_{nn'}|^2).
MomentSet analytic_moments_nrel(const states::SlitPairState& state, int m_max);
double variance_nrel(const states::SlitPairState& state);

// Numeric Var(pbar_tot) via the tabulated fold (see folding.hpp).
double numeric_variance_ptot(const states::SlitPairState& state,
                             const modular::ModularFrame& frame,
                             int grid_per_cell = 64, int n_cells = 24,
                             const envelope::EnvelopeTable* table = nullptr);

// (d^2/h^2) numeric Var(pbar_tot) + Var(N_x,rel) of the suboptimal
// state built from src.
double criterion_lhs_suboptimal(const states::EprSource& src,
                                const states::GratingSpec& g,
                                const modular::ModularFrame& frame,
                                const folding::FoldOptions& opts = {});

// Critical sigma_x,rel where the criterion lhs reaches 2C, at fixed
// sigma_x,cm = 1.5 N d; bisection over (0.05 d, d).
double critical_sigma_rel(int n_slits, const states::GratingSpec& g,
                          const modular::ModularFrame& frame,
                          const folding::FoldOptions& opts = {});

// Critical sigma_x,cm where the numeric Var(pbar_tot) of the
// suboptimal state (sigma_x,rel = 0.1 d fixed) equals the ideal
// (N-1)-slit value; bisection over (0.02 N d, 2 N d).  N >= 3.
double critical_sigma_cm(int n_slits, const states::GratingSpec& g,
                         const modular::ModularFrame& frame,
                         const folding::FoldOptions& opts = {});

}  // namespace nly::observables
