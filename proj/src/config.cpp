// SPDX-License-Identifier: Apache-2.0
#include "nlyoung/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nlyoung/io.hpp"

namespace nly::config {

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.grating = states::GratingSpec(2, 1.0, 0.1);
  const double sigma_rel = 0.05;
  const double sigma_cm = 3.0 * cfg.grating.n_slits * cfg.grating.d;
  const double t_max = sigma_rel * sigma_rel * 1.0 / 1.0;  // hbar = m = 1
  cfg.source = states::EprSource(sigma_rel, sigma_cm, 1.0, 0.5 * t_max);
  cfg.frame = modular::ModularFrame(cfg.grating.d, 2.0 * 3.14159265358979323846);
  cfg.sampler.seed = 42;
  cfg.sampler.n_events = 100000;
  return cfg;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct ParsedIni {
  // section -> key -> value, plus ordered key paths for error messages
  std::map<std::string, std::map<std::string, std::string>> data;
};

ParsedIni parse_ini(const std::string& text) {
  ParsedIni ini;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw_error(ErrorKind::config,
                    "config: malformed section header at line " +
                        std::to_string(lineno));
      section = trim(t.substr(1, t.size() - 2));
      ini.data[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw_error(ErrorKind::config, "config: expected key = value at line " +
                                         std::to_string(lineno));
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (section.empty())
      throw_error(ErrorKind::config,
                  "config: key '" + key + "' outside any section");
    if (ini.data[section].count(key))
      throw_error(ErrorKind::config,
                  "config: duplicate key '" + section + "." + key + "'");
    ini.data[section][key] = value;
  }
  return ini;
}

class SectionReader {
 public:
  SectionReader(const ParsedIni& ini, const std::string& section)
      : section_(section) {
    const auto it = ini.data.find(section);
    if (it != ini.data.end()) kv_ = &it->second;
  }

  bool present() const { return kv_ != nullptr; }

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    if (!kv_ || !kv_->count(key)) return fallback;
    const std::string& v = kv_->at(key);
    try {
      size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (...) {
      throw_error(ErrorKind::config, "config: key '" + section_ + "." + key +
                                         "' has a malformed number '" + v + "'");
    }
  }

  std::string text(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    if (!kv_ || !kv_->count(key)) return fallback;
    return kv_->at(key);
  }

  void reject_unknown() const {
    if (!kv_) return;
    for (const auto& [key, value] : *kv_)
      if (!seen_.count(key))
        throw_error(ErrorKind::config,
                    "config: unknown key '" + section_ + "." + key + "'");
  }

 private:
  const std::map<std::string, std::string>* kv_ = nullptr;
  std::string section_;
  std::set<std::string> seen_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  const ParsedIni ini = parse_ini(text);
  const std::set<std::string> known_sections = {
      "grating", "source", "displacement", "ensemble",
      "sampler", "frame",  "output"};
  for (const auto& [section, kv] : ini.data)
    if (!known_sections.count(section))
      throw_error(ErrorKind::config, "config: unknown section '" + section + "'");

  ExperimentConfig cfg = default_config();

  SectionReader grating(ini, "grating");
  const int n_slits = static_cast<int>(grating.number("n_slits", 2));
  const double d = grating.number("d", 1.0);
  const double a = grating.number("a", 0.1);
  grating.reject_unknown();
  cfg.grating = states::GratingSpec(n_slits, d, a);

  SectionReader source(ini, "source");
  const double default_sigma_rel = 0.05 * d;
  const double default_sigma_cm = 3.0 * n_slits * d;
  const double sigma_rel = source.number("sigma_x_rel", default_sigma_rel);
  const double sigma_cm = source.number("sigma_x_cm", default_sigma_cm);
  const double mass = source.number("mass", 1.0);
  const double default_t = 0.5 * sigma_rel * sigma_rel * mass;  // 0.5 T_max
  const double t_grating = source.number("t_grating", default_t);
  source.reject_unknown();
  cfg.source = states::EprSource(sigma_rel, sigma_cm, mass, t_grating);

  SectionReader disp(ini, "displacement");
  if (disp.present()) {
    states::Displacement dd;
    dd.x_cm0 = disp.number("x_cm0", 0.0);
    dd.x_rel0 = disp.number("x_rel0", 0.0);
    dd.p_cm0 = disp.number("p_cm0", 0.0);
    dd.p_rel0 = disp.number("p_rel0", 0.0);
    disp.reject_unknown();
    cfg.displacement = dd;
  }

  SectionReader ens(ini, "ensemble");
  if (ens.present()) {
    states::SourceEnsemble e;
    e.s0_x_cm = ens.number("s0_x_cm", 0.0);
    e.s0_x_rel = ens.number("s0_x_rel", 0.0);
    e.s0_p_cm = ens.number("s0_p_cm", 0.0);
    e.s0_p_rel = ens.number("s0_p_rel", 0.0);
    ens.reject_unknown();
    if (e.s0_x_cm < 0 || e.s0_x_rel < 0 || e.s0_p_cm < 0 || e.s0_p_rel < 0)
      throw_error(ErrorKind::config, "config: ensemble widths must be >= 0");
    cfg.ensemble = e;
    cfg.sampler.ensemble = e;
  }

  SectionReader smp(ini, "sampler");
  cfg.sampler.seed = static_cast<std::uint64_t>(smp.number("seed", 42));
  cfg.sampler.n_events = static_cast<std::int64_t>(smp.number("n_events", 100000));
  cfg.sampler.admixture_w = smp.number("admixture_w", 0.0);
  cfg.sampler.phase_shift = smp.number("phase_shift", 0.0);
  const double far_t2 = smp.number("far_t2", 0.0);
  if (far_t2 > 0.0) cfg.sampler.far_t2 = far_t2;
  cfg.sampler.mass = mass;
  cfg.sampler.grid_per_cell = static_cast<int>(smp.number("grid_per_cell", 64));
  cfg.sampler.n_cells = static_cast<int>(smp.number("n_cells", 24));
  const std::string state = smp.text("state", "mme");
  smp.reject_unknown();
  if (cfg.sampler.n_events < 1)
    throw_error(ErrorKind::config, "config: sampler.n_events must be >= 1");
  if (cfg.sampler.admixture_w < 0.0 || cfg.sampler.admixture_w > 1.0)
    throw_error(ErrorKind::config, "config: sampler.admixture_w must be in [0,1]");
  if (state == "mme")
    cfg.state = StateKind::mme;
  else if (state == "suboptimal")
    cfg.state = StateKind::suboptimal;
  else
    throw_error(ErrorKind::config,
                "config: sampler.state must be 'mme' or 'suboptimal'");

  SectionReader frame(ini, "frame");
  const double fd = frame.number("d", d);
  const double fh = frame.number("h", 2.0 * 3.14159265358979323846);
  frame.reject_unknown();
  cfg.frame = modular::ModularFrame(fd, fh);

  SectionReader output(ini, "output");
  cfg.events_path = output.text("events", "events.csv");
  cfg.results_path = output.text("results", "results.csv");
  output.reject_unknown();

  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw_error(ErrorKind::io, "config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[grating]\n";
  out << "n_slits = " << cfg.grating.n_slits << "\n";
  out << "d = " << io::format_double(cfg.grating.d) << "\n";
  out << "a = " << io::format_double(cfg.grating.a) << "\n";
  out << "\n[source]\n";
  out << "sigma_x_rel = " << io::format_double(cfg.source.sigma_x_rel) << "\n";
  out << "sigma_x_cm = " << io::format_double(cfg.source.sigma_x_cm) << "\n";
  out << "mass = " << io::format_double(cfg.source.mass) << "\n";
  out << "t_grating = " << io::format_double(cfg.source.t_grating) << "\n";
  if (cfg.displacement) {
    out << "\n[displacement]\n";
    out << "x_cm0 = " << io::format_double(cfg.displacement->x_cm0) << "\n";
    out << "x_rel0 = " << io::format_double(cfg.displacement->x_rel0) << "\n";
    out << "p_cm0 = " << io::format_double(cfg.displacement->p_cm0) << "\n";
    out << "p_rel0 = " << io::format_double(cfg.displacement->p_rel0) << "\n";
  }
  if (cfg.ensemble) {
    out << "\n[ensemble]\n";
    out << "s0_x_cm = " << io::format_double(cfg.ensemble->s0_x_cm) << "\n";
    out << "s0_x_rel = " << io::format_double(cfg.ensemble->s0_x_rel) << "\n";
    out << "s0_p_cm = " << io::format_double(cfg.ensemble->s0_p_cm) << "\n";
    out << "s0_p_rel = " << io::format_double(cfg.ensemble->s0_p_rel) << "\n";
  }
  out << "\n[sampler]\n";
  out << "seed = " << cfg.sampler.seed << "\n";
  out << "n_events = " << cfg.sampler.n_events << "\n";
  out << "admixture_w = " << io::format_double(cfg.sampler.admixture_w) << "\n";
  out << "phase_shift = " << io::format_double(cfg.sampler.phase_shift) << "\n";
  if (cfg.sampler.far_t2)
    out << "far_t2 = " << io::format_double(*cfg.sampler.far_t2) << "\n";
  out << "grid_per_cell = " << cfg.sampler.grid_per_cell << "\n";
  out << "n_cells = " << cfg.sampler.n_cells << "\n";
  out << "state = " << (cfg.state == StateKind::mme ? "mme" : "suboptimal") << "\n";
  out << "\n[frame]\n";
  out << "d = " << io::format_double(cfg.frame.d) << "\n";
  out << "h = " << io::format_double(cfg.frame.h) << "\n";
  out << "\n[output]\n";
  out << "events = " << cfg.events_path << "\n";
  out << "results = " << cfg.results_path << "\n";
  return out.str();
}

std::string config_sha(const ExperimentConfig& cfg) {
  return io::sha256_hex(emit_config(cfg));
}

states::SlitPairState build_state(const ExperimentConfig& cfg) {
  const double hbar = cfg.frame.hbar();
  if (cfg.state == StateKind::suboptimal)
    return states::build_suboptimal_state(cfg.grating, cfg.source, hbar);
  return states::build_mme_state(cfg.grating, cfg.source, hbar);
}

}  // namespace nly::config
