// SPDX-License-Identifier: Apache-2.0
#include "nlyoung/observables.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>

#include "nlyoung/specfun.hpp"

namespace nly::observables {

namespace {
constexpr double kPi = 3.14159265358979323846;

double uniform_cell_variance(const modular::ModularFrame& frame) {
  const double period = frame.momentum_period();
  return period * period / 6.0;  // two independent uniform modular parts
}
}  // namespace

double ideal_variance_ptot(int n_slits, const modular::ModularFrame& frame) {
  return uniform_cell_variance(frame) * (1.0 - modular::squeezing_s2(n_slits));
}

double ideal_variance_ptot_shifted(int n_slits, double phi,
                                   const modular::ModularFrame& frame) {
  return uniform_cell_variance(frame) *
         (1.0 - modular::squeezing_s2_shifted(n_slits, phi));
}

double mixture_variance_ptot(int n_slits, double w,
                             const modular::ModularFrame& frame) {
  if (w < 0.0 || w > 1.0)
    throw_error(ErrorKind::invalid_parameter,
                "mixture_variance_ptot: w must lie in [0,1]");
  return uniform_cell_variance(frame) *
         (1.0 - (1.0 - w) * modular::squeezing_s2(n_slits));
}

double classical_admixture_threshold(int n_slits) {
  if (n_slits < 2)
    throw_error(ErrorKind::invalid_parameter,
                "classical_admixture_threshold: N must be >= 2");
  const double c = modular::criterion_constant();
  const double w = (12.0 * c - 1.0) / modular::squeezing_s2(n_slits) + 1.0;
  return std::clamp(w, 0.0, 1.0);
}

double separable_variance_nrel(int n_slits) {
  if (n_slits < 1)
    throw_error(ErrorKind::invalid_parameter,
                "separable_variance_nrel: N must be >= 1");
  const double n = n_slits;
  return (n * n - 1.0) / 6.0;
}

double separable_admixture_threshold() {
  return 4.0 * modular::criterion_constant();
}

double separable_variance_ptot_numeric(int n_slits, const states::GratingSpec& g,
                                       const modular::ModularFrame& frame) {
  // Single-particle multislit momentum density
  //   f(p) = sinc^2(p a / 2 hbar) F_N(p d / h)
  // folded onto the modular cell; the two particles are independent and
  // the first moments vanish by parity, so Var(pbar_tot) = 2 Var_1.
  const double hbar = frame.hbar();
  const double period = frame.momentum_period();
  const int n_cells = 200;  // sinc^2 tails carry the same per-cell fold
  const int gpc = std::max(64, 8 * (n_slits - 1));
  const int n_pts = n_cells * gpc + 1;
  const double half = 0.5 * n_cells * period;
  const double step = period / gpc;

  double mass = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n_pts; ++i) {
    const double p = -half + i * step;
    double w = (i == 0 || i == n_pts - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    w *= step / 3.0;
    const double pb = modular::fold_modular(p, period);
    const bool on_jump = std::abs(std::abs(pb) - 0.5 * period) < 1e-9 * period;
    const double sc = specfun::sinc(p * g.a / (2.0 * hbar));
    const double f =
        sc * sc * modular::fringe_function(n_slits, p * frame.d / frame.h);
    mass += w * f;
    m1 += (on_jump ? 0.0 : w * pb) * f;
    m2 += (on_jump ? w * 0.25 * period * period : w * pb * pb) * f;
  }
  const double mean = m1 / mass;
  return 2.0 * (m2 / mass - mean * mean);
}

double separable_admixture_threshold_numeric(int n_slits,
                                             const states::GratingSpec& g,
                                             const modular::ModularFrame& frame) {
  const double dh = frame.d / frame.h;
  const double v_mme = ideal_variance_ptot(n_slits, frame);
  const double v_sep = separable_variance_ptot_numeric(n_slits, g, frame);
  const double lhs0 = dh * dh * v_mme;
  const double slope =
      dh * dh * (v_sep - v_mme) + separable_variance_nrel(n_slits);
  // lhs(w) is affine in w; invert exactly.
  const double w = (2.0 * modular::criterion_constant() - lhs0) / slope;
  return std::clamp(w, 0.0, 1.0);
}

double extended_source_variance_ptot(int n_slits,
                                     const modular::ModularFrame& frame,
                                     double s0_p_cm, double xi_cm_mag) {
  if (s0_p_cm < 0.0 || xi_cm_mag < 1.0)
    throw_error(ErrorKind::invalid_parameter,
                "extended_source_variance_ptot: require s0_p_cm >= 0, |xi| >= 1");
  const double arg = s0_p_cm * frame.d / (frame.h * xi_cm_mag);
  const double damping = std::exp(-0.5 * arg * arg);
  return uniform_cell_variance(frame) *
         (1.0 - damping * modular::squeezing_s2(n_slits));
}

MomentSet analytic_moments_nrel(const states::SlitPairState& state, int m_max) {
  if (!(state.grating.a < state.grating.d))
    throw_error(ErrorKind::invalid_parameter,
                "analytic_moments_nrel: requires a < d (disjoint slits)");
  const int n = state.n();
  const auto idx = states::slit_indices(n);
  MomentSet out;
  out.observable = Observable::n_x_rel;
  double m1 = 0.0, m2 = 0.0;
  for (int m = 1; m <= std::max(m_max, 2); ++m) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double w = state.coeff(i, j) * state.coeff(i, j);
        acc += w * std::pow(idx[i] - idx[j], m);
      }
    if (m <= m_max) out.moments.emplace_back(m, acc);
    if (m == 1) m1 = acc;
    if (m == 2) m2 = acc;
  }
  out.variance = std::max(0.0, m2 - m1 * m1);
  return out;
}

double variance_nrel(const states::SlitPairState& state) {
  return analytic_moments_nrel(state, 2).variance;
}

double numeric_variance_ptot(const states::SlitPairState& state,
                             const modular::ModularFrame& frame,
                             int grid_per_cell, int n_cells,
                             const envelope::EnvelopeTable* table) {
  folding::FoldOptions opts;
  opts.grid_per_cell = grid_per_cell;
  opts.n_cells = n_cells;
  return folding::fold_ptot_moments(state, frame, opts, table).variance;
}

double criterion_lhs_suboptimal(const states::EprSource& src,
                                const states::GratingSpec& g,
                                const modular::ModularFrame& frame,
                                const folding::FoldOptions& opts) {
  const auto st = states::build_suboptimal_state(g, src, frame.hbar());
  const double dh = frame.d / frame.h;
  const double v = folding::fold_ptot_moments(st, frame, opts).variance;
  return dh * dh * v + variance_nrel(st);
}

namespace {

// Bisection on a monotone bracket; f must change sign across it.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double tol, const char* what) {
  double flo = f(lo), fhi = f(hi);
  if (flo * fhi > 0.0)
    throw_error(ErrorKind::no_root,
                std::string(what) + ": no sign change in bracket");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (flo * fm <= 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double critical_sigma_rel(int n_slits, const states::GratingSpec& g,
                          const modular::ModularFrame& frame,
                          const folding::FoldOptions& opts) {
  if (n_slits < 2)
    throw_error(ErrorKind::invalid_parameter, "critical_sigma_rel: N >= 2");
  states::GratingSpec grating(n_slits, g.d, g.a);
  const double sigma_cm = 1.5 * n_slits * g.d;
  const double threshold = 2.0 * modular::criterion_constant();
  auto f = [&](double sigma_rel) {
    states::EprSource src(sigma_rel, sigma_cm, 1.0, 0.0);
    return criterion_lhs_suboptimal(src, grating, frame, opts) - threshold;
  };
  return bisect(f, 0.05 * g.d, 1.0 * g.d, 5e-4 * g.d, "critical_sigma_rel");
}

double critical_sigma_cm(int n_slits, const states::GratingSpec& g,
                         const modular::ModularFrame& frame,
                         const folding::FoldOptions& opts) {
  if (n_slits < 3)
    throw_error(ErrorKind::invalid_parameter,
                "critical_sigma_cm: N >= 3 (N = 2 keeps full two-slit "
                "interference for any sigma_cm)");
  states::GratingSpec grating(n_slits, g.d, g.a);
  const double sigma_rel = 0.1 * g.d;
  const double target = ideal_variance_ptot(n_slits - 1, frame);
  // Sweeps vary only the coefficients; the envelope depends on
  // (a, sigma_rel, xi_rel) alone, so one table serves every iterate.
  const double reach = std::max(opts.n_cells, 4) * frame.momentum_period();
  states::EprSource probe(sigma_rel, n_slits * g.d, 1.0, 0.0);
  const auto probe_state = states::build_suboptimal_state(grating, probe, frame.hbar());
  envelope::EnvelopeTable table(probe_state, reach, reach, frame.hbar(), opts.exec);

  auto f = [&](double sigma_cm) {
    states::EprSource src(sigma_rel, sigma_cm, 1.0, 0.0);
    const auto st = states::build_suboptimal_state(grating, src, frame.hbar());
    return folding::fold_ptot_moments(st, frame, opts, &table).variance - target;
  };
  return bisect(f, 0.02 * n_slits * g.d, 2.0 * n_slits * g.d,
                5e-4 * n_slits * g.d, "critical_sigma_cm");
}

}  // namespace nly::observables
