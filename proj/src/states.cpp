// SPDX-License-Identifier: Apache-2.0
#include "nlyoung/states.hpp"

#include <cmath>
#include <string>

#include "nlyoung/specfun.hpp"

namespace nly::states {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

GratingSpec::GratingSpec(int n, double d_, double a_) : n_slits(n), d(d_), a(a_) {
  if (n_slits < 1)
    throw_error(ErrorKind::invalid_parameter, "GratingSpec: n_slits must be >= 1");
  if (!(d > 0.0) || !(a > 0.0) || !(a < d))
    throw_error(ErrorKind::invalid_parameter,
                "GratingSpec: require 0 < a < d (a=" + std::to_string(a) +
                    ", d=" + std::to_string(d) + ")");
}

std::vector<double> slit_indices(int n_slits) {
  std::vector<double> idx(n_slits);
  for (int i = 0; i < n_slits; ++i) idx[i] = -0.5 * (n_slits - 1) + i;
  return idx;
}

EprSource::EprSource(double s_rel, double s_cm, double m, double t)
    : sigma_x_rel(s_rel), sigma_x_cm(s_cm), mass(m), t_grating(t) {
  if (!(sigma_x_rel > 0.0) || !(sigma_x_cm > 0.0) || !(mass > 0.0) ||
      t_grating < 0.0)
    throw_error(ErrorKind::invalid_parameter,
                "EprSource: widths and mass must be positive, t >= 0");
}

std::pair<Complex, Complex> dispersion_factors(const EprSource& src, double t,
                                               double hbar) {
  if (t < 0.0)
    throw_error(ErrorKind::invalid_parameter, "dispersion_factors: t must be >= 0");
  const Complex xi_cm(1.0, hbar * t / (4.0 * src.sigma_x_cm * src.sigma_x_cm * src.mass));
  const Complex xi_rel(1.0, hbar * t / (src.sigma_x_rel * src.sigma_x_rel * src.mass));
  return {xi_cm, xi_rel};
}

double max_propagation_time(const EprSource& src, double hbar) {
  return src.sigma_x_rel * src.sigma_x_rel * src.mass / hbar;
}

SetupDiagnostics validate_setup(const EprSource& src, const GratingSpec& g,
                                double hbar) {
  const auto [xi_cm, xi_rel] = dispersion_factors(src, src.t_grating, hbar);
  const double w_rel = src.sigma_x_rel * std::abs(xi_rel);
  const double w_cm = src.sigma_x_cm * std::abs(xi_cm);

  SetupDiagnostics diag;
  diag.slit_correlation_ratio = g.d / w_rel;
  diag.illumination_ratio = w_cm / (g.n_slits * g.d);
  diag.t_max = max_propagation_time(src, hbar);
  diag.neighbor_suppression = std::exp(-std::pow(g.d / (2.0 * w_rel), 2));
  diag.margin_decrease = 1.0 - std::exp(-std::pow(g.n_slits * g.d / (4.0 * w_cm), 2));
  diag.conditions_met =
      diag.slit_correlation_ratio >= 5.0 && diag.illumination_ratio >= 1.0;
  return diag;
}

DisplacedDiagnostics validate_displaced(const EprSource& src, const GratingSpec& g,
                                        const Displacement& disp, double hbar) {
  (void)hbar;
  const double t = src.t_grating;
  DisplacedDiagnostics diag;
  // Classical centers: total mass 2m for the cm motion, reduced mass
  // m/2 for the relative motion.
  diag.x_cm_t = disp.x_cm0 + disp.p_cm0 * t / (2.0 * src.mass);
  diag.x_rel_t = disp.x_rel0 + 2.0 * disp.p_rel0 * t / src.mass;

  const modular::ModularFrame frame(g.d, 2.0 * kPi);  // h irrelevant for x-split
  const auto dec = modular::decompose_position(diag.x_rel_t, frame);
  diag.n_rel_t = dec.integer_part;
  diag.xbar_rel_t = dec.modular_part;

  diag.r1_ok = std::abs(diag.x_cm_t) / (g.n_slits * g.d) <= 0.2;
  diag.r2_ok = std::abs(static_cast<double>(diag.n_rel_t)) / g.n_slits <= 0.2;
  diag.r3_ok = std::abs(diag.xbar_rel_t) < 0.5 * g.a;
  diag.effective_order =
      g.n_slits - static_cast<int>(std::llabs(diag.n_rel_t));
  return diag;
}

SlitPairState build_mme_state(const GratingSpec& g, const EprSource& src,
                              double hbar) {
  SlitPairState st;
  st.grating = g;
  const int n = g.n_slits;
  st.coeffs.assign(static_cast<size_t>(n) * n, 0.0);
  const double w = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) st.coeffs[i * n + i] = w;
  const auto [xi_cm, xi_rel] = dispersion_factors(src, src.t_grating, hbar);
  (void)xi_cm;
  st.sigma_rel_eff = src.sigma_x_rel;
  st.xi_rel = xi_rel;
  st.norm = psi_s_position_norm(g.a, st.sigma_rel_eff, st.xi_rel);
  return st;
}

SlitPairState build_suboptimal_state(const GratingSpec& g, const EprSource& src,
                                     double hbar) {
  const double t_max = max_propagation_time(src, hbar);
  if (src.t_grating > t_max)
    throw_error(ErrorKind::invalid_parameter,
                "build_suboptimal_state: t_grating exceeds T_max = " +
                    std::to_string(t_max) +
                    "; post-grating phases are outside the modeled regime");

  SlitPairState st;
  st.grating = g;
  const int n = g.n_slits;
  const auto [xi_cm, xi_rel] = dispersion_factors(src, src.t_grating, hbar);
  const double w_cm = src.sigma_x_cm * std::abs(xi_cm);
  const double w_rel = src.sigma_x_rel * std::abs(xi_rel);
  const auto idx = slit_indices(n);

  st.coeffs.resize(static_cast<size_t>(n) * n);
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double sum = (idx[i] + idx[j]) * g.d;
      const double dif = (idx[i] - idx[j]) * g.d;
      const double c = std::exp(-sum * sum / (16.0 * w_cm * w_cm) -
                                dif * dif / (4.0 * w_rel * w_rel));
      st.coeffs[i * n + j] = c;
      sq += c * c;
    }
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (auto& c : st.coeffs) c *= inv;

  st.sigma_rel_eff = src.sigma_x_rel;
  st.xi_rel = xi_rel;
  st.norm = psi_s_position_norm(g.a, st.sigma_rel_eff, st.xi_rel);
  return st;
}

double psi_s_position_norm(double a, double sigma_rel, Complex xi_rel) {
  // Integral of exp(-(x1-x2)^2 / (2 sigma^2 |xi|^2)) over the slit
  // square, reduced to 1D: Int_{-a}^{a} (a - |v|) exp(-v^2/2w^2) dv.
  const double w = sigma_rel * std::abs(xi_rel);
  const double sq2 = std::sqrt(2.0);
  const double erf_term = a * w * std::sqrt(kPi / 2.0) * std::erf(a / (w * sq2));
  const double exp_term = w * w * (1.0 - std::exp(-a * a / (2.0 * w * w)));
  return 2.0 * (erf_term - exp_term);
}

double psi_s_position_density(const SlitPairState& state, double u, double v) {
  // window check tolerates representation noise at the slit edges
  const double lim = 0.5 * state.grating.a * (1.0 + 1e-12);
  if (std::abs(u) > lim || std::abs(v) > lim) return 0.0;
  const double w = state.sigma_rel_eff * std::abs(state.xi_rel);
  const double dif = u - v;
  return std::exp(-dif * dif / (2.0 * w * w)) / state.norm;
}

Complex envelope_prefactor(double a, double sigma_rel, Complex xi_rel,
                           double hbar) {
  // Parseval normalization of the convolution form, whose integrand
  // corresponds to a slit pair of full width 2a with the same
  // relative-motion Gaussian; that state's position norm fixes the
  // absolute scale so the joint momentum density integrates to one.
  const double w = sigma_rel * std::abs(xi_rel);
  const double aa = 2.0 * a;
  const double sq2 = std::sqrt(2.0);
  const double erf_term = aa * w * std::sqrt(kPi / 2.0) * std::erf(aa / (w * sq2));
  const double exp_term = w * w * (1.0 - std::exp(-aa * aa / (2.0 * w * w)));
  const double norm2a = 2.0 * (erf_term - exp_term);
  const Complex sqrt_xi = std::sqrt(xi_rel);
  return sigma_rel * a * a * sqrt_xi /
         (std::pow(kPi, 1.5) * hbar * hbar * std::sqrt(norm2a));
}

Complex envelope_amplitude(const SlitPairState& state, double p1, double p2,
                           double hbar, int quad_points) {
  const double a = state.grating.a;
  const double sigma = state.sigma_rel_eff;
  const Complex xi = state.xi_rel;
  const double s = p1 + p2;
  const double r = p1 - p2;

  double half = 8.0 * hbar / sigma + 8.0 * hbar * 2.0 * kPi / a;
  // The Gaussian factor is centered at pt = r; widen the window when a
  // far-tail point is requested so it stays covered.
  half = std::max(half, std::abs(r) + 12.0 * hbar / sigma);
  int n = quad_points;
  // For strongly delocalized relative motion the Gaussian is much
  // narrower than the sinc window; refine until it is resolved.
  const int resolve = static_cast<int>(std::ceil(12.0 * half * sigma / hbar));
  n = std::max(n, resolve);
  if (n % 2 == 0) ++n;
  const double hstep = 2.0 * half / (n - 1);

  Complex sum(0.0, 0.0);
  for (int i = 0; i < n; ++i) {
    const double pt = -half + i * hstep;
    const double sa = specfun::sinc((s + pt) * a / (2.0 * hbar));
    const double sb = specfun::sinc((s - pt) * a / (2.0 * hbar));
    const double g = (r - pt) * sigma / (2.0 * hbar);
    const Complex gauss = std::exp(-xi * (g * g));
    const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * sa * sb * gauss;
  }
  sum *= hstep / 3.0;
  return envelope_prefactor(a, sigma, xi, hbar) * sum;
}

Complex momentum_amplitude(const SlitPairState& state, double p1, double p2,
                           double hbar) {
  const int n = state.n();
  const auto idx = slit_indices(n);
  const double d = state.grating.d;
  Complex phase_sum(0.0, 0.0);
  for (int i = 0; i < n; ++i) {
    const Complex e1 = std::exp(Complex(0.0, -p1 * idx[i] * d / hbar));
    Complex row(0.0, 0.0);
    for (int j = 0; j < n; ++j)
      row += state.coeff(i, j) * std::exp(Complex(0.0, -p2 * idx[j] * d / hbar));
    phase_sum += e1 * row;
  }
  return phase_sum * envelope_amplitude(state, p1, p2, hbar);
}

double far_field_map(double x, double mass, double t2) {
  if (!(t2 > 0.0))
    throw_error(ErrorKind::invalid_parameter, "far_field_map: t2 must be positive");
  return mass * x / t2;
}

bool far_field_valid(const GratingSpec& g, double mass, double t2, double hbar) {
  const double n = g.n_slits;
  return t2 >= 10.0 * mass * n * n * g.d * g.d / hbar;
}

}  // namespace nly::states
