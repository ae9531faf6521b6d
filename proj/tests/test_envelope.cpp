// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <complex>

#include "nlyoung/envelope.hpp"

using namespace nly;

namespace {
constexpr double kPi = 3.14159265358979323846;

states::SlitPairState default_state() {
  states::GratingSpec g(2, 1.0, 0.1);
  states::EprSource src(0.05, 6.0, 1.0, 0.0);
  return states::build_mme_state(g, src);
}
}  // namespace

TEST_CASE("table matches the direct Simpson evaluator") {
  const auto st = default_state();
  const envelope::EnvelopeTable table(st, 60.0, 60.0);
  double ref_scale = std::norm(states::envelope_amplitude(st, 0.0, 0.0));
  int bad = 0;
  for (int i = 0; i < 200; ++i) {
    const double s = -50.0 + 0.47 * i + 0.13;
    const double r = 40.0 - 0.41 * i;
    const double p1 = 0.5 * (s + r), p2 = 0.5 * (s - r);
    const double direct = std::norm(states::envelope_amplitude(st, p1, p2));
    const double interp = table.density(s, r);
    if (std::abs(direct - interp) > 2e-4 * ref_scale) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("table with dispersed (complex) xi_rel") {
  states::GratingSpec g(2, 1.0, 0.1);
  states::EprSource src(0.05, 6.0, 1.0, 0.0);
  const double t_max = states::max_propagation_time(src);
  states::EprSource late(0.05, 6.0, 1.0, t_max);
  const auto st = states::build_suboptimal_state(g, late);
  REQUIRE(st.xi_rel.imag() == doctest::Approx(1.0));

  const envelope::EnvelopeTable table(st, 40.0, 40.0);
  double ref_scale = std::norm(states::envelope_amplitude(st, 0.0, 0.0));
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const double s = -30.0 + 0.61 * i;
    const double r = 25.0 - 0.52 * i;
    const double p1 = 0.5 * (s + r), p2 = 0.5 * (s - r);
    const double direct = std::norm(states::envelope_amplitude(st, p1, p2));
    if (std::abs(direct - table.density(s, r)) > 2e-4 * ref_scale) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("serial and parallel builds agree bitwise") {
  const auto st = default_state();
  const envelope::EnvelopeTable ts(st, 30.0, 30.0, 1.0, envelope::Exec::serial);
  const envelope::EnvelopeTable tp(st, 30.0, 30.0, 1.0, envelope::Exec::parallel);
  int bad = 0;
  for (int i = 0; i < 500; ++i) {
    const double s = -29.0 + 0.116 * i;
    const double r = 28.0 - 0.113 * i;
    if (ts.density(s, r) != tp.density(s, r)) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("enclosed mass grows toward the Parseval total") {
  const auto st = default_state();
  const double cell = 2.0 * kPi;
  const envelope::EnvelopeTable table(st, 48.0 * cell, 48.0 * cell);
  const double m12 = table.enclosed_mass(24.0 * cell, 24.0 * cell);
  const double m24 = table.enclosed_mass(48.0 * cell, 48.0 * cell);
  // the envelope integral (fringe factor averages to one per cell) is
  // normalized to one over the whole plane
  CHECK(m12 < m24);
  CHECK(m24 < 1.0 + 1e-6);
  CHECK(m12 > 0.80);
  CHECK(m24 > 0.90);
  // hard-slit tails decay like 1/P: the doubling gap shrinks by ~2
  const double gap12 = 1.0 - m12;
  const double gap24 = 1.0 - m24;
  CHECK(gap12 / gap24 == doctest::Approx(2.0).epsilon(0.35));
}

TEST_CASE("density clamps to zero outside and near sinc zeros") {
  const auto st = default_state();
  const envelope::EnvelopeTable table(st, 20.0, 20.0);
  CHECK(table.density(1000.0, 0.0) == 0.0);
  CHECK(table.density(0.0, -999.0) == 0.0);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const double s = -19.0 + 0.038 * i;
    if (table.density(s, 0.37) < 0.0) ++bad;
  }
  CHECK(bad == 0);
}
