// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration: INI-style sections of key = value pairs.
// Unknown sections or keys are hard errors so sweep typos cannot pass
// silently.  emit -> parse -> emit is idempotent.
#pragma once

#include <optional>
#include <string>

#include "nlyoung/modular.hpp"
#include "nlyoung/sampler.hpp"
#include "nlyoung/states.hpp"

namespace nly::config {

enum class StateKind { mme, suboptimal };

struct ExperimentConfig {
  states::GratingSpec grating{2, 1.0, 0.1};
  states::EprSource source{0.05, 6.0, 1.0, 0.00125};  // defaults: see below
  std::optional<states::Displacement> displacement;
  std::optional<states::SourceEnsemble> ensemble;
  sampler::SamplerConfig sampler;
  modular::ModularFrame frame;
  StateKind state = StateKind::mme;
  std::string events_path = "events.csv";
  std::string results_path = "results.csv";
};

// Library defaults: sigma_rel = 0.05 d, sigma_cm = 3 N d,
// t_grating = 0.5 T_max, N = 2 slits with a = 0.1 d.
ExperimentConfig default_config();

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string emit_config(const ExperimentConfig& cfg);

// SHA-256 of the canonical (emitted) form; stamped into outputs.
std::string config_sha(const ExperimentConfig& cfg);

// The post-grating state selected by `state`.
states::SlitPairState build_state(const ExperimentConfig& cfg);

}  // namespace nly::config
