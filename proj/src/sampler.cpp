// SPDX-License-Identifier: Apache-2.0
#include "nlyoung/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlyoung/folding.hpp"
#include "nlyoung/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nly::sampler {

using states::Complex;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kStreamNear = 1;
constexpr std::uint64_t kStreamFar = 2;
constexpr std::uint64_t kStreamEnsemble = 3;
constexpr std::uint64_t kStreamPrecheck = 4;

// Flattened discrete distribution with prefix-sum inversion.
struct DiscreteCdf {
  std::vector<double> cum;

  void build(const std::vector<double>& weights) {
    cum.resize(weights.size());
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      cum[i] = acc;
    }
  }
  double total() const { return cum.empty() ? 0.0 : cum.back(); }
  size_t sample(double u) const {
    const double target = u * total();
    const auto it = std::upper_bound(cum.begin(), cum.end(), target);
    const size_t idx = static_cast<size_t>(it - cum.begin());
    return std::min(idx, cum.size() - 1);
  }
};

template <typename Fn>
void for_each_event(std::int64_t n, Exec exec, Fn&& fn) {
  if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t e = 0; e < n; ++e) fn(e);
  } else {
    for (std::int64_t e = 0; e < n; ++e) fn(e);
  }
}

}  // namespace

// The classical admixture shares the near-field density (it only drops
// inter-pair coherences), so admixture_w does not enter here.
std::vector<EventRecord> sample_near(const states::SlitPairState& state,
                                     const SamplerConfig& cfg) {
  const int n = state.n();
  const auto idx = states::slit_indices(n);
  const double d = state.grating.d;
  const double a = state.grating.a;

  // Slit-pair distribution |c_{nn'}|^2.
  std::vector<double> pair_w(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      pair_w[i * n + j] = state.coeff(i, j) * state.coeff(i, j);
  DiscreteCdf pair_cdf;
  pair_cdf.build(pair_w);

  // Intra-pair |Psi_s|^2 on a 256x256 pixel grid over the slit square.
  // The density is the same for every slit pair (shift invariance).
  constexpr int kNPix = 256;
  const double step = a / kNPix;
  std::vector<double> pix(static_cast<size_t>(kNPix) * kNPix);
  const double w_rel = state.sigma_rel_eff * std::abs(state.xi_rel);
  for (int iu = 0; iu < kNPix; ++iu) {
    const double u = -0.5 * a + (iu + 0.5) * step;
    for (int iv = 0; iv < kNPix; ++iv) {
      const double v = -0.5 * a + (iv + 0.5) * step;
      const double dif = u - v;
      pix[iu * static_cast<size_t>(kNPix) + iv] =
          std::exp(-dif * dif / (2.0 * w_rel * w_rel));
    }
  }
  DiscreteCdf pix_cdf;
  pix_cdf.build(pix);

  // Near-field coordinates are recorded with the origin calibrated on a
  // slit center, so every slit lies inside one modular cell and the
  // integer part of a position names its slit.  For even N the
  // symmetry axis falls between two slits (half-integer indices); the
  // modular analysis owns the choice of coordinate origin.
  const double origin = (n % 2 == 0) ? 0.5 * d : 0.0;

  std::vector<EventRecord> out(cfg.n_events);
  for_each_event(cfg.n_events, cfg.exec, [&](std::int64_t e) {
    rng::EventRng r(cfg.seed, kStreamNear, static_cast<std::uint64_t>(e));
    const size_t pair = pair_cdf.sample(r.uniform());
    const size_t cell = pix_cdf.sample(r.uniform());
    const double ju = r.uniform();
    const double jv = r.uniform();
    const int i = static_cast<int>(pair) / n;
    const int j = static_cast<int>(pair) % n;
    const int iu = static_cast<int>(cell) / kNPix;
    const int iv = static_cast<int>(cell) % kNPix;
    EventRecord ev;
    ev.plane = Plane::near;
    ev.u1 = idx[i] * d + origin - 0.5 * a + (iu + ju) * step;
    ev.u2 = idx[j] * d + origin - 0.5 * a + (iv + jv) * step;
    out[e] = ev;
  });
  return out;
}

std::vector<EventRecord> sample_far(const states::SlitPairState& state,
                                    const SamplerConfig& cfg,
                                    const modular::ModularFrame& frame) {
  const int n = state.n();
  const double hbar = frame.hbar();
  const double period = frame.momentum_period();
  const int gpc = folding::effective_grid_per_cell(cfg.grid_per_cell, n);
  const int n_cells = std::max(cfg.n_cells, 4);
  const int n_pix = n_cells * gpc;
  const double half = 0.5 * n_cells * period;
  const double step = period / gpc;

  const envelope::EnvelopeTable table(state, n_cells * period, n_cells * period,
                                      hbar, cfg.exec);

  // Pattern shift: F_N(xi + phi/2pi) means the phase sum is evaluated
  // at momenta offset by delta/2 per particle, delta = phi h / (2 pi d).
  const double delta = cfg.phase_shift * frame.h / (2.0 * kPi * frame.d);
  std::vector<double> centers(n_pix);
  for (int i = 0; i < n_pix; ++i) centers[i] = -half + (i + 0.5) * step;
  std::vector<double> shifted(centers);
  for (auto& p : shifted) p += 0.5 * delta;
  const auto phases = folding::slit_phase_table(state, shifted, hbar);

  std::vector<double> w_quantum(static_cast<size_t>(n_pix) * n_pix);
  std::vector<double> w_classical(static_cast<size_t>(n_pix) * n_pix);

  auto fill_row = [&](int i1) {
    std::vector<Complex> v(n);
    const double p1 = centers[i1];
    for (int i2 = 0; i2 < n_pix; ++i2) {
      const double p2 = centers[i2];
      Complex amp(0.0, 0.0);
      for (int k = 0; k < n; ++k) {
        Complex acc(0.0, 0.0);
        for (int j = 0; j < n; ++j)
          acc += state.coeff(k, j) * phases[i2 * static_cast<size_t>(n) + j];
        amp += phases[i1 * static_cast<size_t>(n) + k] * acc;
      }
      const double env = table.density(p1 + p2, p1 - p2);
      w_quantum[i1 * static_cast<size_t>(n_pix) + i2] = std::norm(amp) * env;
      w_classical[i1 * static_cast<size_t>(n_pix) + i2] = env;
    }
  };
  if (cfg.exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i1 = 0; i1 < n_pix; ++i1) fill_row(i1);
  } else {
    for (int i1 = 0; i1 < n_pix; ++i1) fill_row(i1);
  }

  DiscreteCdf cdf_q, cdf_cl;
  cdf_q.build(w_quantum);
  cdf_cl.build(w_classical);

  // Enclosed quantum mass (Parseval-normalized density, pixel rule).
  const double mass = cdf_q.total() * step * step;
  if (mass < folding::kCoverageFloor)
    throw_error(ErrorKind::insufficient_coverage,
                "sample_far: tabulated grid encloses only " +
                    std::to_string(mass * 100.0) + "% of the density mass");

  const double t2 = cfg.far_t2.value_or(0.0);
  const double screen_scale = (t2 > 0.0) ? t2 / cfg.mass : 1.0;

  std::vector<EventRecord> out(cfg.n_events);
  for_each_event(cfg.n_events, cfg.exec, [&](std::int64_t e) {
    rng::EventRng r(cfg.seed, kStreamFar, static_cast<std::uint64_t>(e));
    const bool classical = r.uniform() < cfg.admixture_w;
    const auto& cdf = classical ? cdf_cl : cdf_q;
    const size_t cell = cdf.sample(r.uniform());
    const double j1 = r.uniform();
    const double j2 = r.uniform();
    const int i1 = static_cast<int>(cell) / n_pix;
    const int i2 = static_cast<int>(cell) % n_pix;
    const double p1 = -half + (i1 + j1) * step;
    const double p2 = -half + (i2 + j2) * step;
    EventRecord ev;
    ev.plane = Plane::far;
    ev.u1 = p1 * screen_scale;
    ev.u2 = p2 * screen_scale;
    out[e] = ev;
  });
  return out;
}

namespace {

// Shared machinery for the ensemble sampler: per-s-pixel slices of the
// envelope density over r, restricted to the (p1,p2) box.
struct SliceTable {
  int n_s = 0;
  int n_r = 0;
  double s0 = 0.0, ds = 0.0;
  double r0 = 0.0, dr = 0.0;
  std::vector<double> value;  // [is * n_r + ir], envelope density
  std::vector<double> cum;    // trapezoid cumulative per slice, same layout
  std::vector<double> slice_mass;

  double sample_r(int is, double u) const {
    const double* c = &cum[is * static_cast<size_t>(n_r)];
    const double* f = &value[is * static_cast<size_t>(n_r)];
    const double target = u * c[n_r - 1];
    const auto end = c + n_r;
    const double* it = std::upper_bound(c, end, target);
    int k = static_cast<int>(it - c);
    k = std::clamp(k, 1, n_r - 1);
    // invert the linear density on bin [k-1, k]
    const double c0 = c[k - 1];
    const double f0 = f[k - 1], f1 = f[k];
    const double rem = target - c0;
    const double denom = 0.5 * (f0 + f1) * dr;
    double t;
    if (std::abs(f1 - f0) < 1e-12 * (f0 + f1 + 1e-300)) {
      t = denom > 0.0 ? rem / denom : 0.5;
    } else {
      const double A = 0.5 * (f1 - f0) * dr;
      const double B = f0 * dr;
      const double disc = std::max(0.0, B * B + 4.0 * A * rem);
      t = (-B + std::sqrt(disc)) / (2.0 * A);
    }
    t = std::clamp(t, 0.0, 1.0);
    return r0 + (k - 1 + t) * dr;
  }
};

SliceTable build_slices(const envelope::EnvelopeTable& table, double half,
                        int n_cells, int gpc, double period, Exec exec) {
  SliceTable st;
  st.ds = period / gpc;
  st.n_s = 2 * n_cells * gpc;
  st.s0 = -2.0 * half;
  st.dr = period / 8.0;
  st.n_r = 32 * n_cells + 1;
  st.r0 = -2.0 * half;
  st.value.assign(static_cast<size_t>(st.n_s) * st.n_r, 0.0);
  st.cum.assign(static_cast<size_t>(st.n_s) * st.n_r, 0.0);
  st.slice_mass.assign(st.n_s, 0.0);

  auto fill = [&](int is) {
    const double s = st.s0 + (is + 0.5) * st.ds;
    const double window = 2.0 * half - std::abs(s);  // |r| <= window
    double* v = &st.value[is * static_cast<size_t>(st.n_r)];
    double* c = &st.cum[is * static_cast<size_t>(st.n_r)];
    for (int ir = 0; ir < st.n_r; ++ir) {
      const double r = st.r0 + ir * st.dr;
      v[ir] = (std::abs(r) <= window) ? table.density(s, r) : 0.0;
    }
    double acc = 0.0;
    c[0] = 0.0;
    for (int ir = 1; ir < st.n_r; ++ir) {
      acc += 0.5 * (v[ir - 1] + v[ir]) * st.dr;
      c[ir] = acc;
    }
    st.slice_mass[is] = acc;
  };
  if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int is = 0; is < st.n_s; ++is) fill(is);
  } else {
    for (int is = 0; is < st.n_s; ++is) fill(is);
  }
  return st;
}

}  // namespace

std::vector<EventRecord> sample_ensemble(const states::EprSource& src,
                                         const states::GratingSpec& g,
                                         const states::SourceEnsemble& ens,
                                         const SamplerConfig& cfg,
                                         const modular::ModularFrame& frame,
                                         EnsembleDiagnostics* diag,
                                         const states::Displacement& center) {
  const double hbar = frame.hbar();
  const auto state = states::build_mme_state(g, src, hbar);
  const bool centered = center.x_cm0 == 0.0 && center.x_rel0 == 0.0 &&
                        center.p_cm0 == 0.0 && center.p_rel0 == 0.0;
  if (ens.is_zero() && centered) {
    if (diag) *diag = EnsembleDiagnostics{};
    return sample_far(state, cfg, frame);
  }

  const auto [xi_cm, xi_rel] = states::dispersion_factors(src, src.t_grating, hbar);
  (void)xi_rel;
  const double xi_cm_mag = std::abs(xi_cm);
  const int n = g.n_slits;
  const double period = frame.momentum_period();
  const int gpc = folding::effective_grid_per_cell(cfg.grid_per_cell, n);
  const int n_cells = std::max(cfg.n_cells, 4);
  const double half = 0.5 * n_cells * period;

  const envelope::EnvelopeTable table(state, n_cells * period, n_cells * period,
                                      hbar, cfg.exec);
  const SliceTable slices =
      build_slices(table, half, n_cells, gpc, period, cfg.exec);

  double mass = 0.0;
  for (int is = 0; is < slices.n_s; ++is) mass += slices.slice_mass[is];
  mass *= 0.5 * slices.ds;  // dp1 dp2 = ds dr / 2
  if (mass < folding::kCoverageFloor)
    throw_error(ErrorKind::insufficient_coverage,
                "sample_ensemble: tabulated grid encloses only " +
                    std::to_string(mass * 100.0) + "% of the density mass");

  EnsembleDiagnostics local;
  // Precheck: joint r1-r3 pass rate over a fixed pre-draw.
  {
    constexpr int kPre = 1000;
    int pass = 0;
    for (int e = 0; e < kPre; ++e) {
      rng::EventRng r(cfg.seed, kStreamPrecheck, static_cast<std::uint64_t>(e));
      states::Displacement disp;
      disp.x_cm0 = center.x_cm0 + ens.s0_x_cm * r.gauss();
      disp.x_rel0 = center.x_rel0 + ens.s0_x_rel * r.gauss();
      disp.p_cm0 = center.p_cm0 + ens.s0_p_cm * r.gauss();
      disp.p_rel0 = center.p_rel0 + ens.s0_p_rel * r.gauss();
      const auto vd = states::validate_displaced(src, g, disp, hbar);
      if (vd.r1_ok && vd.r2_ok && vd.r3_ok) ++pass;
    }
    local.precheck_pass_rate = pass / static_cast<double>(kPre);
    local.precheck_warning = local.precheck_pass_rate <= 0.5;
  }

  const double t = src.t_grating;
  const double m = src.mass;
  const double t2 = cfg.far_t2.value_or(0.0);
  constexpr int kMaxAttempts = 100000;

  std::vector<EventRecord> out(cfg.n_events);
  std::vector<std::int64_t> attempts(cfg.n_events, 0);
  std::vector<std::int64_t> rejects(cfg.n_events, 0);
  std::vector<char> capped(cfg.n_events, 0);

  for_each_event(cfg.n_events, cfg.exec, [&](std::int64_t e) {
    rng::EventRng r(cfg.seed, kStreamEnsemble, static_cast<std::uint64_t>(e));
    std::vector<double> scum(slices.n_s);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      ++attempts[e];
      const double gx_cm = r.gauss();
      const double gx_rel = r.gauss();
      const double gp_cm = r.gauss();
      const double gp_rel = r.gauss();
      const double x_rel0 = center.x_rel0 + ens.s0_x_rel * gx_rel;
      const double p_cm0 = center.p_cm0 + ens.s0_p_cm * gp_cm;
      const double p_rel0 = center.p_rel0 + ens.s0_p_rel * gp_rel;
      (void)gx_cm;  // x_cm displacement shifts neither fringe nor window

      const double bern = r.uniform();
      const double u_s = r.uniform();
      const double j_s = r.uniform();
      const double u_r = r.uniform();

      const double x_rel_t = x_rel0 + 2.0 * p_rel0 * t / m;
      const double xbar = modular::fold_modular(x_rel_t, g.d);
      if (!(std::abs(xbar) < 0.5 * g.a)) {
        ++rejects[e];
        continue;  // blocked pair, resample Gamma
      }
      const auto dec = modular::decompose_position(x_rel_t, modular::ModularFrame(g.d, frame.h));
      const int n_eff =
          std::max(1, n - static_cast<int>(std::llabs(dec.integer_part)));

      // Pattern phase of this realization, in the S2 convention (the
      // Gaussian average then reproduces the blurred-variance damping
      // exp(-(s0_p_cm d)^2 / (2 h^2 |xi_cm|^2)) for the j = 1 harmonic).
      const double phi_gamma = p_cm0 * frame.d / (frame.h * xi_cm_mag);
      const bool classical = bern < cfg.admixture_w;

      double total = 0.0;
      for (int is = 0; is < slices.n_s; ++is) {
        double w = slices.slice_mass[is];
        if (!classical && w > 0.0) {
          const double s = slices.s0 + (is + 0.5) * slices.ds;
          const double xi_arg = s * frame.d / frame.h +
                                (cfg.phase_shift - phi_gamma) / (2.0 * kPi);
          w *= modular::fringe_function(n_eff, xi_arg);
        }
        total += w;
        scum[is] = total;
      }
      const double target = u_s * total;
      const auto it = std::upper_bound(scum.begin(), scum.end(), target);
      int is = static_cast<int>(it - scum.begin());
      is = std::min(is, slices.n_s - 1);
      const double s = slices.s0 + (is + j_s) * slices.ds;
      const double rr = slices.sample_r(is, u_r);
      const double p1 = 0.5 * (s + rr);
      const double p2 = 0.5 * (s - rr);
      EventRecord ev;
      ev.plane = Plane::far;
      ev.u1 = (t2 > 0.0) ? p1 * t2 / m : p1;
      ev.u2 = (t2 > 0.0) ? p2 * t2 / m : p2;
      out[e] = ev;
      return;
    }
    // Throwing inside a parallel region is not allowed; flag instead.
    capped[e] = 1;
  });

  for (std::int64_t e = 0; e < cfg.n_events; ++e)
    if (capped[e])
      throw_error(ErrorKind::degenerate_ensemble,
                  "sample_ensemble: blocked-pair rejection exceeded the attempt cap");

  std::int64_t total_attempts = 0, total_rejects = 0;
  for (std::int64_t e = 0; e < cfg.n_events; ++e) {
    total_attempts += attempts[e];
    total_rejects += rejects[e];
  }
  local.total_attempts = total_attempts;
  local.blocked_rejections = total_rejects;
  if (diag) *diag = local;
  if (total_attempts > 0 &&
      static_cast<double>(total_rejects) / total_attempts > 0.9)
    throw_error(ErrorKind::degenerate_ensemble,
                "sample_ensemble: rejection rate " +
                    std::to_string(100.0 * total_rejects / total_attempts) +
                    "% exceeds 90%");
  return out;
}

}  // namespace nly::sampler
