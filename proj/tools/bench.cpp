// SPDX-License-Identifier: Apache-2.0
//
// Compares the serial reference implementations against the OpenMP
// kernels: envelope tabulation, the modular fold, and event sampling.
#include <chrono>
#include <cstdio>

#include "nlyoung/config.hpp"
#include "nlyoung/folding.hpp"
#include "nlyoung/sampler.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename Fn>
double timed(Fn&& fn) {
  const auto t0 = Clock::now();
  fn();
  return seconds_since(t0);
}

}  // namespace

int main() {
  using namespace nly;
  const auto cfg = config::default_config();
  const auto state = config::build_state(cfg);
  const double period = cfg.frame.momentum_period();
  const double reach = cfg.sampler.n_cells * period;

  std::printf("%-28s %10s %10s %8s\n", "kernel", "serial[s]", "openmp[s]",
              "speedup");

  double serial = 0.0, parallel = 0.0;
  serial = timed([&] {
    envelope::EnvelopeTable t(state, reach, reach, cfg.frame.hbar(),
                              envelope::Exec::serial);
    (void)t;
  });
  parallel = timed([&] {
    envelope::EnvelopeTable t(state, reach, reach, cfg.frame.hbar(),
                              envelope::Exec::parallel);
    (void)t;
  });
  std::printf("%-28s %10.3f %10.3f %8.2f\n", "envelope table", serial, parallel,
              serial / parallel);

  folding::FoldOptions fo;
  fo.exec = folding::Exec::serial;
  double var_serial = 0.0, var_parallel = 0.0;
  serial = timed([&] {
    var_serial = folding::fold_ptot_moments(state, cfg.frame, fo).variance;
  });
  fo.exec = folding::Exec::parallel;
  parallel = timed([&] {
    var_parallel = folding::fold_ptot_moments(state, cfg.frame, fo).variance;
  });
  std::printf("%-28s %10.3f %10.3f %8.2f   (match: %s)\n", "modular fold",
              serial, parallel, serial / parallel,
              var_serial == var_parallel ? "bitwise" : "DIFFER");

  sampler::SamplerConfig sc = cfg.sampler;
  sc.n_events = 200000;
  sc.exec = sampler::Exec::serial;
  std::vector<sampler::EventRecord> ev_serial, ev_parallel;
  serial = timed([&] { ev_serial = sampler::sample_far(state, sc, cfg.frame); });
  sc.exec = sampler::Exec::parallel;
  parallel = timed([&] { ev_parallel = sampler::sample_far(state, sc, cfg.frame); });
  bool same = ev_serial.size() == ev_parallel.size();
  for (size_t i = 0; same && i < ev_serial.size(); ++i)
    same = ev_serial[i].u1 == ev_parallel[i].u1 &&
           ev_serial[i].u2 == ev_parallel[i].u2;
  std::printf("%-28s %10.3f %10.3f %8.2f   (match: %s)\n", "far-field sampler",
              serial, parallel, serial / parallel, same ? "bitwise" : "DIFFER");
  return 0;
}
