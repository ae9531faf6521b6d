// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nlyoung/config.hpp"
#include "nlyoung/io.hpp"

using namespace nly;
using nly::Error;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("sha256 known vectors") {
  CHECK(io::sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(io::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(io::sha256_hex("The quick brown fox jumps over the lazy dog") ==
        "d7a8fbb307d7809469ca9abcb0082e4f8d5651e46d3cdb762d02d0bf37c9e592");
}

TEST_CASE("event file round trip is bit exact") {
  io::EventFile file;
  file.meta.seed = 424242;
  file.meta.config_sha = io::sha256_hex("test");
  file.meta.far_field = sampler::FarFieldMeta{1.0, 500.0};
  for (int i = 0; i < 100; ++i) {
    sampler::EventRecord ev;
    ev.plane = (i % 2) ? sampler::Plane::far : sampler::Plane::near;
    ev.u1 = std::sin(i * 0.7123) * 13.37;
    ev.u2 = std::cos(i * 1.931) / 3.0;
    file.events.push_back(ev);
  }
  const std::string p1 = "/tmp/nly_events_a.csv";
  const std::string p2 = "/tmp/nly_events_b.csv";
  io::write_events(p1, file);
  const auto back = io::read_events(p1);
  REQUIRE(back.events.size() == file.events.size());
  CHECK(back.meta.seed == file.meta.seed);
  CHECK(back.meta.config_sha == file.meta.config_sha);
  REQUIRE(back.meta.far_field.has_value());
  CHECK(back.meta.far_field->t2 == 500.0);
  int diff = 0;
  for (size_t i = 0; i < file.events.size(); ++i) {
    if (back.events[i].u1 != file.events[i].u1) ++diff;
    if (back.events[i].u2 != file.events[i].u2) ++diff;
    if (back.events[i].plane != file.events[i].plane) ++diff;
  }
  CHECK(diff == 0);
  io::write_events(p2, back);
  CHECK(slurp(p1) == slurp(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("event file errors") {
  CHECK_THROWS_AS(io::read_events("/tmp/nly_does_not_exist.csv"), Error);
  const std::string p = "/tmp/nly_bad.csv";
  {
    std::ofstream out(p);
    out << "wrong,header\n";
  }
  CHECK_THROWS_AS(io::read_events(p), Error);
  std::remove(p.c_str());
}

TEST_CASE("config round trip is idempotent") {
  auto cfg = config::default_config();
  cfg.ensemble = states::SourceEnsemble{0.1, 0.0, 0.2, 0.0};
  cfg.sampler.ensemble = cfg.ensemble;
  const std::string once = config::emit_config(cfg);
  const auto parsed = config::parse_config(once);
  const std::string twice = config::emit_config(parsed);
  CHECK(once == twice);
  CHECK(config::config_sha(cfg) == config::config_sha(parsed));
}

TEST_CASE("config rejects unknown keys by name") {
  const std::string text = "[grating]\nn_slits = 2\nslit_widthh = 0.1\n";
  try {
    config::parse_config(text);
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    CHECK(std::string(e.what()).find("slit_widthh") != std::string::npos);
  }

  CHECK_THROWS_AS(config::parse_config("[gratings]\nn_slits = 2\n"), Error);
  CHECK_THROWS_AS(config::parse_config("[grating]\nd = abc\n"), Error);
  CHECK_THROWS_AS(config::parse_config("loose = 1\n"), Error);
  CHECK_THROWS_AS(config::parse_config("[sampler]\nn_events = 0\n"), Error);
  CHECK_THROWS_AS(config::parse_config("[sampler]\nadmixture_w = 1.5\n"), Error);
  CHECK_THROWS_AS(config::parse_config("[grating]\nn_slits = 2\nn_slits = 3\n"),
                  Error);
}

TEST_CASE("default config satisfies the setup conditions") {
  const auto cfg = config::default_config();
  const auto diag = states::validate_setup(cfg.source, cfg.grating);
  CHECK(diag.conditions_met);
  CHECK(cfg.source.t_grating ==
        doctest::Approx(0.5 * states::max_propagation_time(cfg.source)));
  // ratios from the documented defaults
  CHECK(cfg.source.sigma_x_rel == doctest::Approx(0.05 * cfg.grating.d));
  CHECK(cfg.source.sigma_x_cm ==
        doctest::Approx(3.0 * cfg.grating.n_slits * cfg.grating.d));
}

TEST_CASE("format_double survives the round trip") {
  for (double v : {1.0 / 3.0, 1e-300, 6.283185307179586, -0.0, 1.7e17}) {
    const double back = std::stod(io::format_double(v));
    CHECK(back == v);
  }
}
