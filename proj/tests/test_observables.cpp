// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "nlyoung/observables.hpp"
#include "oracles.hpp"

using namespace nly;
using nly::Error;

namespace {
constexpr double kPi = 3.14159265358979323846;
const modular::ModularFrame kFrame(1.0, 2.0 * kPi);

double uniform_var() {
  const double p = kFrame.momentum_period();
  return p * p / 6.0;
}
}  // namespace

TEST_CASE("ideal variance and its shifted form") {
  using observables::ideal_variance_ptot;
  using observables::ideal_variance_ptot_shifted;

  CHECK(ideal_variance_ptot(1, kFrame) == doctest::Approx(uniform_var()));
  CHECK(ideal_variance_ptot(2, kFrame) ==
        doctest::Approx(uniform_var() * (1.0 - 3.0 / (kPi * kPi))));

  // large-N scaling ~ (h/pi d)^2 (1 + gamma + ln N)/N within 5% at N = 100
  const double h_over_d = kFrame.momentum_period();
  const double scaling = std::pow(h_over_d / kPi, 2) *
                         (1.0 + 0.5772156649 + std::log(100.0)) / 100.0;
  CHECK(ideal_variance_ptot(100, kFrame) ==
        doctest::Approx(scaling).epsilon(0.05));

  CHECK(ideal_variance_ptot_shifted(5, 0.0, kFrame) ==
        doctest::Approx(ideal_variance_ptot(5, kFrame)));
  CHECK(ideal_variance_ptot_shifted(2, kPi, kFrame) ==
        doctest::Approx(uniform_var() * (1.0 + 3.0 / (kPi * kPi))));

  // the phi average restores the uniform variance
  double mean = 0.0;
  const int m = 720;
  for (int i = 0; i < m; ++i)
    mean += ideal_variance_ptot_shifted(4, 2.0 * kPi * i / m, kFrame) / m;
  CHECK(mean == doctest::Approx(uniform_var()).epsilon(1e-10));
}

TEST_CASE("classical admixture") {
  using observables::mixture_variance_ptot;
  CHECK(mixture_variance_ptot(2, 0.0, kFrame) ==
        doctest::Approx(observables::ideal_variance_ptot(2, kFrame)));
  CHECK(mixture_variance_ptot(2, 1.0, kFrame) == doctest::Approx(uniform_var()));
  CHECK(mixture_variance_ptot(2, 0.5, kFrame) ==
        doctest::Approx(uniform_var() * (1.0 - 0.5 * 3.0 / (kPi * kPi))));

  const double w2 = observables::classical_admixture_threshold(2);
  CHECK(w2 == doctest::Approx(0.79).epsilon(0.013));  // reference value 0.79

  // large N: S2 -> 1, threshold -> 12 C
  const double c = modular::criterion_constant();
  CHECK(observables::classical_admixture_threshold(100000) ==
        doctest::Approx(12.0 * c).epsilon(1e-3));

  // threshold consistency: the mixture variance at w_crit sits exactly
  // at the criterion bound
  for (int n : {2, 3, 10}) {
    const double wc = observables::classical_admixture_threshold(n);
    const double dh = kFrame.d / kFrame.h;
    CHECK(dh * dh * mixture_variance_ptot(n, wc, kFrame) ==
          doctest::Approx(2.0 * c).epsilon(1e-9));
  }

  // the lhs is affine in w
  const double l0 = mixture_variance_ptot(3, 0.0, kFrame);
  const double l1 = mixture_variance_ptot(3, 1.0, kFrame);
  CHECK(mixture_variance_ptot(3, 0.25, kFrame) ==
        doctest::Approx(0.75 * l0 + 0.25 * l1).epsilon(1e-12));
}

TEST_CASE("separable state") {
  CHECK(observables::separable_variance_nrel(1) == 0.0);
  CHECK(observables::separable_variance_nrel(2) == doctest::Approx(0.5));
  for (int n = 1; n <= 10; ++n)
    CHECK(observables::separable_variance_nrel(n) ==
          doctest::Approx(oracles::uniform_pair_variance(n)).epsilon(1e-12));

  CHECK(observables::separable_admixture_threshold() ==
        doctest::Approx(0.3129).epsilon(0.002));

  // the full-mixture numeric threshold is below the N_rel-only bound
  states::GratingSpec g(2, 1.0, 0.1);
  const double wn = observables::separable_admixture_threshold_numeric(2, g, kFrame);
  CHECK(wn > 0.0);
  CHECK(wn <= observables::separable_admixture_threshold());

  // the separable state's own modular-total variance is below uniform
  // (local fringes squeeze each particle separately)
  const double vsep = observables::separable_variance_ptot_numeric(2, g, kFrame);
  CHECK(vsep < uniform_var());
  CHECK(vsep > 0.0);
}

TEST_CASE("extended source damping") {
  using observables::extended_source_variance_ptot;
  CHECK(extended_source_variance_ptot(2, kFrame, 0.0, 1.0) ==
        doctest::Approx(observables::ideal_variance_ptot(2, kFrame)));

  // s0_p_cm d / h = 1 damps S2 by exp(-1/2)
  const double s0 = kFrame.h / kFrame.d;
  const double expected =
      uniform_var() * (1.0 - std::exp(-0.5) * modular::squeezing_s2(2));
  CHECK(extended_source_variance_ptot(2, kFrame, s0, 1.0) ==
        doctest::Approx(expected).epsilon(1e-12));

  // huge spread: fringes wash out completely
  CHECK(extended_source_variance_ptot(2, kFrame, 50.0 * s0, 1.0) ==
        doctest::Approx(uniform_var()).epsilon(1e-6));
}

TEST_CASE("analytic N_rel moments") {
  states::GratingSpec g(4, 1.0, 0.1);
  states::EprSource src(0.05, 12.0, 1.0, 0.0);
  const auto mme = states::build_mme_state(g, src);
  CHECK(observables::variance_nrel(mme) == doctest::Approx(0.0));

  // uniform product coefficients reproduce (N^2-1)/6
  states::SlitPairState uni = mme;
  for (auto& c : uni.coeffs) c = 1.0 / 4.0;  // 1/N with N = 4
  CHECK(observables::variance_nrel(uni) ==
        doctest::Approx(observables::separable_variance_nrel(4)).epsilon(1e-12));

  // single-pair state: all central moments vanish
  states::SlitPairState one = mme;
  for (auto& c : one.coeffs) c = 0.0;
  one.coeffs[1 * 4 + 2] = 1.0;
  CHECK(observables::variance_nrel(one) == doctest::Approx(0.0));

  // brute-force double sum on pseudo-random coefficients
  std::uint64_t s = 7;
  auto next = [&]() {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(s >> 11) * 0x1.0p-53;
  };
  for (int rep = 0; rep < 5; ++rep) {
    states::SlitPairState rnd = mme;
    double sq = 0.0;
    for (auto& c : rnd.coeffs) {
      c = next();
      sq += c * c;
    }
    for (auto& c : rnd.coeffs) c /= std::sqrt(sq);
    const auto idx = states::slit_indices(4);
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double w = rnd.coeff(i, j) * rnd.coeff(i, j);
        m1 += w * (idx[i] - idx[j]);
        m2 += w * (idx[i] - idx[j]) * (idx[i] - idx[j]);
      }
    CHECK(observables::variance_nrel(rnd) ==
          doctest::Approx(m2 - m1 * m1).epsilon(1e-12));
  }
}

TEST_CASE("numeric fold vs closed form (ideal MME)") {
  states::GratingSpec g(2, 1.0, 0.1);
  states::EprSource src(0.05, 6.0, 1.0, 0.0);
  const auto st = states::build_mme_state(g, src);
  const double numeric = observables::numeric_variance_ptot(st, kFrame);
  const double closed = observables::ideal_variance_ptot(2, kFrame);
  CHECK(std::abs(numeric - closed) / closed < 0.02);
  // and the lattice-sum oracle agrees too
  CHECK(oracles::lattice_variance_ptot(st, kFrame.momentum_period()) ==
        doctest::Approx(closed).epsilon(1e-12));
}

TEST_CASE("numeric fold vs lattice oracle (suboptimal states)") {
  for (double sigma_rel : {0.2, 0.46}) {
    states::GratingSpec g(2, 1.0, 0.1);
    states::EprSource src(sigma_rel, 3.0, 1.0, 0.0);
    const auto st = states::build_suboptimal_state(g, src);
    const double numeric = observables::numeric_variance_ptot(st, kFrame);
    const double oracle =
        oracles::lattice_variance_ptot(st, kFrame.momentum_period());
    CHECK(std::abs(numeric - oracle) / oracle < 0.02);
  }
  // a five-slit case exercises higher fringe harmonics
  states::GratingSpec g5(5, 1.0, 0.1);
  states::EprSource src5(0.1, 0.7 * 5.0, 1.0, 0.0);
  const auto st5 = states::build_suboptimal_state(g5, src5);
  const double numeric = observables::numeric_variance_ptot(st5, kFrame);
  const double oracle =
      oracles::lattice_variance_ptot(st5, kFrame.momentum_period());
  CHECK(std::abs(numeric - oracle) / oracle < 0.02);
}

TEST_CASE("uniform modular density: no fringes gives h^2/6d^2") {
  // N = 1 has F == 1: two independent uniform modular parts
  states::GratingSpec g(1, 1.0, 0.1);
  states::EprSource src(0.05, 6.0, 1.0, 0.0);
  const auto st = states::build_mme_state(g, src);
  const double numeric = observables::numeric_variance_ptot(st, kFrame);
  CHECK(numeric == doctest::Approx(uniform_var()).epsilon(5e-3));
}

TEST_CASE("fold self-convergence and coverage error") {
  states::GratingSpec g(2, 1.0, 0.1);
  states::EprSource src(0.05, 6.0, 1.0, 0.0);
  const auto st = states::build_mme_state(g, src);
  const double v64 = observables::numeric_variance_ptot(st, kFrame, 64, 24);
  const double v128 = observables::numeric_variance_ptot(st, kFrame, 128, 24);
  CHECK(std::abs(v128 - v64) / v64 < 0.002);

  // a grid that misses the envelope bulk must refuse
  CHECK_THROWS_AS(observables::numeric_variance_ptot(st, kFrame, 64, 4), Error);
}

TEST_CASE("suboptimal criterion lhs") {
  states::GratingSpec g(2, 1.0, 0.1);
  // near-ideal limit
  states::EprSource ideal(0.01, 200.0, 1.0, 0.0);
  const double lhs0 = observables::criterion_lhs_suboptimal(ideal, g, kFrame);
  const double expected = (1.0 - modular::squeezing_s2(2)) / 6.0;
  CHECK(std::abs(lhs0 - expected) / expected < 0.02);

  // The lhs first dips slightly below the ideal value (intra-pair
  // coherences squeeze the single-particle modular momenta before the
  // N_rel variance takes over), then rises monotonically through the
  // detection threshold.
  double prev = -1.0;
  for (double s : {0.36, 0.40, 0.44, 0.48}) {
    states::EprSource src(s, 3.0, 1.0, 0.0);
    const double lhs = observables::criterion_lhs_suboptimal(src, g, kFrame);
    CHECK(lhs > prev);
    prev = lhs;
  }
  states::EprSource dip(0.30, 3.0, 1.0, 0.0);
  CHECK(observables::criterion_lhs_suboptimal(dip, g, kFrame) < lhs0);

  // at the critical width the lhs crosses the threshold
  states::EprSource edge(0.46, 3.0, 1.0, 0.0);
  const double lhs_edge = observables::criterion_lhs_suboptimal(edge, g, kFrame);
  CHECK(lhs_edge == doctest::Approx(2.0 * modular::criterion_constant()).epsilon(0.02));
}

TEST_CASE("critical sigma_rel at N=2") {
  states::GratingSpec g(2, 1.0, 0.1);
  const double crit = observables::critical_sigma_rel(2, g, kFrame);
  CHECK(crit == doctest::Approx(0.462).epsilon(0.022));  // +-0.01 absolute
  CHECK(std::abs(crit - 0.462) < 0.01);
}

TEST_CASE("critical sigma_cm at N=3") {
  states::GratingSpec g(3, 1.0, 0.1);
  const double crit = observables::critical_sigma_cm(3, g, kFrame);
  CHECK(std::abs(crit / 3.0 - 0.148) < 0.015);
  CHECK_THROWS_AS(observables::critical_sigma_cm(2, g, kFrame), Error);
}
