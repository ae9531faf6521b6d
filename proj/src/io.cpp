// SPDX-License-Identifier: Apache-2.0
#include "nlyoung/io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nlyoung/errors.hpp"

namespace nly::io {

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4), compact single-buffer implementation.
namespace {

constexpr std::array<std::uint32_t, 64> kSha256K = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
    0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
    0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
    0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
    0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
    0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
    0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
    0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

inline std::uint32_t rotr(std::uint32_t x, int n) {
  return (x >> n) | (x << (32 - n));
}

}  // namespace

std::string sha256_hex(const std::string& data) {
  std::array<std::uint32_t, 8> h = {0x6a09e667, 0xbb67ae85, 0x3c6ef372,
                                    0xa54ff53a, 0x510e527f, 0x9b05688c,
                                    0x1f83d9ab, 0x5be0cd19};
  std::string msg = data;
  const std::uint64_t bit_len = static_cast<std::uint64_t>(msg.size()) * 8;
  msg.push_back(static_cast<char>(0x80));
  while (msg.size() % 64 != 56) msg.push_back('\0');
  for (int i = 7; i >= 0; --i)
    msg.push_back(static_cast<char>((bit_len >> (8 * i)) & 0xff));

  std::array<std::uint32_t, 64> w{};
  for (size_t chunk = 0; chunk < msg.size(); chunk += 64) {
    for (int i = 0; i < 16; ++i) {
      w[i] = (static_cast<std::uint8_t>(msg[chunk + 4 * i]) << 24) |
             (static_cast<std::uint8_t>(msg[chunk + 4 * i + 1]) << 16) |
             (static_cast<std::uint8_t>(msg[chunk + 4 * i + 2]) << 8) |
             static_cast<std::uint8_t>(msg[chunk + 4 * i + 3]);
    }
    for (int i = 16; i < 64; ++i) {
      const std::uint32_t s0 =
          rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      const std::uint32_t s1 =
          rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    auto [a, b, c, d, e, f, g, hh] = h;
    for (int i = 0; i < 64; ++i) {
      const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      const std::uint32_t ch = (e & f) ^ (~e & g);
      const std::uint32_t tmp1 = hh + s1 + ch + kSha256K[i] + w[i];
      const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      const std::uint32_t tmp2 = s0 + maj;
      hh = g;
      g = f;
      f = e;
      e = d + tmp1;
      d = c;
      c = b;
      b = a;
      a = tmp1 + tmp2;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
    h[5] += f;
    h[6] += g;
    h[7] += hh;
  }
  char out[65];
  for (int i = 0; i < 8; ++i) std::snprintf(out + 8 * i, 9, "%08x", h[i]);
  return std::string(out, 64);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

void write_events(const std::string& path, const EventFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw_error(ErrorKind::io, "write_events: cannot open " + path);
  out << "# seed=" << file.meta.seed << ", config_sha=" << file.meta.config_sha
      << ", units=" << file.meta.units << "\n";
  if (file.meta.far_field) {
    out << "# far_field_mass=" << format_double(file.meta.far_field->mass)
        << ", far_field_t2=" << format_double(file.meta.far_field->t2) << "\n";
  }
  out << "plane,u1,u2,weight\n";
  for (const auto& ev : file.events) {
    out << (ev.plane == sampler::Plane::near ? "near" : "far") << ','
        << format_double(ev.u1) << ',' << format_double(ev.u2) << ','
        << format_double(ev.weight) << "\n";
  }
  if (!out)
    throw_error(ErrorKind::io, "write_events: write failure on " + path);
}

namespace {

double parse_double(const std::string& s, const std::string& path) {
  try {
    return std::stod(s);
  } catch (...) {
    throw_error(ErrorKind::io, "read_events: malformed number '" + s + "' in " + path);
  }
}

// Extracts `key=value` from a preamble comment fragment.
bool preamble_value(const std::string& line, const std::string& key,
                    std::string* out) {
  const auto pos = line.find(key + "=");
  if (pos == std::string::npos) return false;
  const auto start = pos + key.size() + 1;
  auto end = line.find(',', start);
  if (end == std::string::npos) end = line.size();
  *out = line.substr(start, end - start);
  return true;
}

}  // namespace

EventFile read_events(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw_error(ErrorKind::io, "read_events: cannot open " + path);
  EventFile file;
  std::string line;
  bool header_seen = false;
  sampler::FarFieldMeta ff;
  bool have_ff = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string v;
      if (preamble_value(line, "seed", &v)) file.meta.seed = std::stoull(v);
      if (preamble_value(line, "config_sha", &v)) file.meta.config_sha = v;
      // units is last on its line and may itself contain commas
      const auto upos = line.find("units=");
      if (upos != std::string::npos) file.meta.units = line.substr(upos + 6);
      if (preamble_value(line, "far_field_mass", &v)) {
        ff.mass = parse_double(v, path);
        have_ff = true;
      }
      if (preamble_value(line, "far_field_t2", &v)) {
        ff.t2 = parse_double(v, path);
        have_ff = true;
      }
      continue;
    }
    if (!header_seen) {
      if (line != "plane,u1,u2,weight")
        throw_error(ErrorKind::io,
                    "read_events: unexpected header '" + line + "' in " + path);
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string plane, a, b, w;
    if (!std::getline(ss, plane, ',') || !std::getline(ss, a, ',') ||
        !std::getline(ss, b, ',') || !std::getline(ss, w, ','))
      throw_error(ErrorKind::io, "read_events: malformed record in " + path);
    sampler::EventRecord ev;
    if (plane == "near")
      ev.plane = sampler::Plane::near;
    else if (plane == "far")
      ev.plane = sampler::Plane::far;
    else
      throw_error(ErrorKind::io, "read_events: unknown plane '" + plane + "'");
    ev.u1 = parse_double(a, path);
    ev.u2 = parse_double(b, path);
    ev.weight = parse_double(w, path);
    file.events.push_back(ev);
  }
  if (!header_seen)
    throw_error(ErrorKind::io, "read_events: missing header in " + path);
  if (have_ff) file.meta.far_field = ff;
  return file;
}

}  // namespace nly::io
