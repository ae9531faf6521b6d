// SPDX-License-Identifier: Apache-2.0
//
// Event-file format (bit-exact): UTF-8 CSV with header
// `plane,u1,u2,weight`, one record per line, 17 significant digits, and
// a comment preamble carrying seed, config hash, unit system and
// optional far-field metadata.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlyoung/sampler.hpp"

namespace nly::io {

struct EventFileMeta {
  std::uint64_t seed = 0;
  std::string config_sha;
  std::string units = "natural(hbar=1,d=1,m=1)";
  std::optional<sampler::FarFieldMeta> far_field;
};

struct EventFile {
  EventFileMeta meta;
  std::vector<sampler::EventRecord> events;
};

std::string sha256_hex(const std::string& data);

void write_events(const std::string& path, const EventFile& file);
EventFile read_events(const std::string& path);

// Renders a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

}  // namespace nly::io
