// SPDX-License-Identifier: Apache-2.0
//
// Modular-variable algebra: decomposition of position/momentum into
// integer and modular parts, the N-slit fringe function, the squeezing
// functions S2, and the modular entanglement criterion.
#pragma once

#include <cstdint>

#include "nlyoung/errors.hpp"

namespace nly::modular {

// Length period d and Planck constant h of the active unit system.
// The grating momentum (momentum period) is h/d.
struct ModularFrame {
  double d = 1.0;
  double h = 6.283185307179586476925287;  // natural units: hbar = 1

  ModularFrame() = default;
  ModularFrame(double d_, double h_);

  double momentum_period() const { return h / d; }
  double hbar() const { return h / (2.0 * 3.14159265358979323846); }
};

// value = integer_part * period + modular_part, with the modular part
// confined to the half-open fundamental cell [-period/2, period/2).
struct ModularDecomposition {
  std::int64_t integer_part = 0;
  double modular_part = 0.0;
};

struct CriterionReport {
  double lhs = 0.0;        // (d^2/h^2) Var(pbar_tot) + Var(N_x,rel)
  double threshold = 0.0;  // 2C
  bool entangled = false;  // lhs < threshold
  double lhs_stderr = 0.0; // 0 for analytic inputs
};

ModularDecomposition decompose_position(double x, const ModularFrame& frame);
ModularDecomposition decompose_momentum(double p, const ModularFrame& frame);

// Raw modular fold onto [-period/2, period/2) for a given period.
double fold_modular(double value, double period);

// F_N(xi) = 1 + (2/N) sum_{j=1}^{N-1} (N-j) cos(2 pi j xi).
// Unit period, F_1 == 1, F_N(0) = N.
double fringe_function(int n_slits, double xi);

// S2(N) = (6/pi^2) sum_{j=1}^{N-1} (N-j)/(N j^2), in [0,1).
double squeezing_s2(int n_slits);

// Asymptotic form 1 - 6 (1 + gamma + ln N) / (pi^2 N).
double squeezing_s2_asymptotic(int n_slits);

// Phase-shifted squeezing S2(N, phi) with cos(j phi) factors;
// S2(N,0) = S2(N) and S2(N,phi) <= S2(N).
double squeezing_s2_shifted(int n_slits, double phi);

// The criterion constant C: smallest root mu0 in (0, 0.5] of
//   d/dx [ exp(-pi x^2) M(-pi mu/2 + 1/4, 1/2, 2 pi x^2) ] at x = 1/2 = 0,
// evaluated through the analytic chain-rule derivative.  Computed once
// on first use and cached (thread-safe); approximately 0.078235.
double criterion_constant();

// Residual of the criterion-constant equation at mu (exposed for tests).
double criterion_root_function(double mu);

// lhs = (d^2/h^2) var_ptot + var_nrel, compared against 2C.
CriterionReport evaluate_criterion(double var_ptot, double var_nrel,
                                   const ModularFrame& frame,
                                   double stderr_lhs = 0.0);

}  // namespace nly::modular
