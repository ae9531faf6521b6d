// SPDX-License-Identifier: Apache-2.0
#include "nlyoung/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "nlyoung/analysis.hpp"
#include "nlyoung/config.hpp"
#include "nlyoung/folding.hpp"
#include "nlyoung/io.hpp"
#include "nlyoung/observables.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nly::cli {

namespace {

constexpr double kPi = 3.14159265358979323846;

void apply_jobs(int jobs) {
  if (jobs <= 0) {
    const char* env = std::getenv("NLYOUNG_JOBS");
    if (env) jobs = std::atoi(env);
  }
#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#else
  (void)jobs;
#endif
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_error(ErrorKind::io, "cannot open output file " + path);
  return out;
}

void write_csv_preamble(std::ostream& out, const config::ExperimentConfig& cfg) {
  out << "# config_sha=" << config::config_sha(cfg)
      << ", seed=" << cfg.sampler.seed << "\n";
}

int cmd_validate(const config::ExperimentConfig& cfg) {
  const auto diag = states::validate_setup(cfg.source, cfg.grating, cfg.frame.hbar());
  std::cout << "slit_correlation_ratio = " << diag.slit_correlation_ratio
            << "  (d / sigma_rel|xi_rel|, want >= 5)\n";
  std::cout << "illumination_ratio = " << diag.illumination_ratio
            << "  (sigma_cm|xi_cm| / N d, want >= 1)\n";
  std::cout << "t_max = " << diag.t_max << "  (t_grating = " << cfg.source.t_grating
            << ")\n";
  std::cout << "neighbor_suppression = " << diag.neighbor_suppression << "\n";
  std::cout << "margin_decrease = " << diag.margin_decrease << "\n";
  std::cout << "conditions_met = " << (diag.conditions_met ? "true" : "false")
            << "\n";
  if (!diag.conditions_met)
    std::cout << "warning: slit-correlation or illumination condition not met\n";
  if (!cfg.source.epr_regime())
    std::cout << "warning: sigma_x_rel >= sigma_x_cm (outside the EPR regime)\n";
  if (cfg.displacement) {
    const auto vd = states::validate_displaced(cfg.source, cfg.grating,
                                               *cfg.displacement, cfg.frame.hbar());
    std::cout << "x_cm_T = " << vd.x_cm_t << "  r1_ok = " << (vd.r1_ok ? "true" : "false")
              << "\n";
    std::cout << "x_rel_T = " << vd.x_rel_t << "  N_rel_T = " << vd.n_rel_t
              << "  xbar_rel_T = " << vd.xbar_rel_t << "\n";
    std::cout << "r2_ok = " << (vd.r2_ok ? "true" : "false")
              << "  r3_ok = " << (vd.r3_ok ? "true" : "false")
              << "  effective_order = " << vd.effective_order << "\n";
    if (!vd.r3_ok)
      std::cout << "warning: displaced pair is blocked by the gratings (r3)\n";
  }
  return 0;
}

int cmd_pattern(const config::ExperimentConfig& cfg, const std::string& plane,
                int grid, const std::string& out_path) {
  const auto state = config::build_state(cfg);
  auto out = open_output(out_path);
  write_csv_preamble(out, cfg);
  out << "kind,coord1,coord2,value\n";

  if (plane == "near") {
    const double extent = 0.5 * cfg.grating.n_slits * cfg.grating.d +
                          cfg.grating.d;
    const int n = grid;
    std::vector<double> marginal(2 * n - 1, 0.0);
    const double step = 2.0 * extent / (n - 1);
    for (int i = 0; i < n; ++i) {
      const double x1 = -extent + i * step;
      for (int j = 0; j < n; ++j) {
        const double x2 = -extent + j * step;
        double rho = 0.0;
        const auto idx = states::slit_indices(state.n());
        for (int ii = 0; ii < state.n(); ++ii)
          for (int jj = 0; jj < state.n(); ++jj) {
            const double c = state.coeff(ii, jj);
            if (c == 0.0) continue;
            rho += c * c *
                   states::psi_s_position_density(
                       state, x1 - idx[ii] * cfg.grating.d,
                       x2 - idx[jj] * cfg.grating.d);
          }
        out << "joint," << io::format_double(x1) << ',' << io::format_double(x2)
            << ',' << io::format_double(rho) << "\n";
        marginal[i + j] += rho * step;
      }
    }
    for (int k = 0; k < 2 * n - 1; ++k) {
      const double s = 2.0 * (-extent) + k * step;
      out << "marginal," << io::format_double(s) << ",,"
          << io::format_double(marginal[k]) << "\n";
    }
    return 0;
  }

  if (plane != "far")
    throw_error(ErrorKind::config, "pattern: plane must be 'near' or 'far'");

  const double period = cfg.frame.momentum_period();
  const double half = 0.5 * cfg.sampler.n_cells * period;
  const envelope::EnvelopeTable table(state, cfg.sampler.n_cells * period,
                                      cfg.sampler.n_cells * period,
                                      cfg.frame.hbar());
  const int n = grid;
  const double step = 2.0 * half / (n - 1);
  std::vector<double> points(n);
  for (int i = 0; i < n; ++i) points[i] = -half + i * step;
  const auto phases = folding::slit_phase_table(state, points, cfg.frame.hbar());
  std::vector<double> marginal(2 * n - 1, 0.0);
  const int ns = state.n();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      states::Complex amp(0.0, 0.0);
      for (int k = 0; k < ns; ++k) {
        states::Complex acc(0.0, 0.0);
        for (int l = 0; l < ns; ++l)
          acc += state.coeff(k, l) * phases[j * static_cast<size_t>(ns) + l];
        amp += phases[i * static_cast<size_t>(ns) + k] * acc;
      }
      const double rho =
          std::norm(amp) * table.density(points[i] + points[j], points[i] - points[j]);
      out << "joint," << io::format_double(points[i]) << ','
          << io::format_double(points[j]) << ',' << io::format_double(rho) << "\n";
      marginal[i + j] += rho * step;
    }
  }
  for (int k = 0; k < 2 * n - 1; ++k) {
    const double s = -2.0 * half + k * step;
    out << "marginal," << io::format_double(s) << ",,"
        << io::format_double(marginal[k]) << "\n";
  }
  return 0;
}

int cmd_sample(const config::ExperimentConfig& cfg, const std::string& out_path) {
  const auto state = config::build_state(cfg);
  if (cfg.sampler.far_t2 &&
      !states::far_field_valid(cfg.grating, cfg.source.mass,
                               *cfg.sampler.far_t2, cfg.frame.hbar()))
    std::cout << "warning: far_t2 below the dispersion-dominated limit "
                 "(10 m N^2 d^2 / hbar); screen positions are not yet "
                 "faithful momentum maps\n";
  io::EventFile file;
  file.meta.seed = cfg.sampler.seed;
  file.meta.config_sha = config::config_sha(cfg);
  if (cfg.sampler.far_t2)
    file.meta.far_field =
        sampler::FarFieldMeta{cfg.source.mass, *cfg.sampler.far_t2};

  auto near = sampler::sample_near(state, cfg.sampler);
  std::vector<sampler::EventRecord> far;
  const bool displaced =
      cfg.displacement &&
      (cfg.displacement->x_cm0 != 0.0 || cfg.displacement->x_rel0 != 0.0 ||
       cfg.displacement->p_cm0 != 0.0 || cfg.displacement->p_rel0 != 0.0);
  if ((cfg.ensemble && !cfg.ensemble->is_zero()) || displaced) {
    sampler::EnsembleDiagnostics diag;
    const states::SourceEnsemble ens =
        cfg.ensemble.value_or(states::SourceEnsemble{});
    const states::Displacement center =
        cfg.displacement.value_or(states::Displacement{});
    far = sampler::sample_ensemble(cfg.source, cfg.grating, ens, cfg.sampler,
                                   cfg.frame, &diag, center);
    if (diag.precheck_warning)
      std::cout << "warning: displaced-source precheck pass rate "
                << diag.precheck_pass_rate * 100.0 << "% (<= 50%)\n";
    if (diag.blocked_rejections > 0)
      std::cout << "blocked-pair rejections: " << diag.blocked_rejections << " / "
                << diag.total_attempts << " attempts\n";
  } else {
    far = sampler::sample_far(state, cfg.sampler, cfg.frame);
  }
  file.events = std::move(near);
  file.events.insert(file.events.end(), far.begin(), far.end());
  io::write_events(out_path, file);
  std::cout << "wrote " << file.events.size() << " events to " << out_path << "\n";
  return 0;
}

int cmd_analyze(const std::vector<std::string>& paths, double frame_d,
                double frame_h, bool auto_phase, int hist_bins,
                const std::string& out_path) {
  std::vector<sampler::EventRecord> near, far;
  std::optional<sampler::FarFieldMeta> meta;
  for (const auto& path : paths) {
    const auto file = io::read_events(path);
    if (file.meta.far_field) meta = file.meta.far_field;
    for (const auto& ev : file.events)
      (ev.plane == sampler::Plane::near ? near : far).push_back(ev);
  }
  const modular::ModularFrame frame(frame_d, frame_h);

  std::ostringstream rep;
  rep << "n_near=" << near.size() << "\n";
  rep << "n_far=" << far.size() << "\n";
  double phi = 0.0;
  if (auto_phase && !far.empty()) {
    phi = analysis::fit_phase(far, frame, meta);
    rep << "phi_star=" << phi << "\n";
  }
  const auto nrel = analysis::estimate_nrel_moments(near, frame);
  const auto ptot = analysis::estimate_ptot_moments(far, frame, 2, phi, meta);
  const auto report =
      analysis::criterion_from_events(near, far, frame, auto_phase, meta);
  rep << "var_nrel=" << io::format_double(nrel.variance)
      << " stderr=" << io::format_double(nrel.stderr_variance) << "\n";
  rep << "var_ptot=" << io::format_double(ptot.variance)
      << " stderr=" << io::format_double(ptot.stderr_variance) << "\n";
  rep << "lhs=" << io::format_double(report.lhs)
      << " threshold=" << io::format_double(report.threshold)
      << " lhs_stderr=" << io::format_double(report.lhs_stderr) << "\n";
  rep << "entangled=" << (report.entangled ? "true" : "false") << "\n";
  if (!far.empty()) {
    const auto hist =
        analysis::fringe_histogram(far, analysis::HistogramAxis::sum, hist_bins, frame);
    rep << "sum_visibility=" << hist.visibility << "\n";
    rep << "sum_dominant_period=" << io::format_double(hist.dominant_period) << "\n";
    rep << "single1_grating_power="
        << io::format_double(analysis::grating_frequency_power(
               far, analysis::HistogramAxis::single1, frame, meta))
        << "\n";
  }
  std::cout << rep.str();
  if (!out_path.empty()) {
    auto out = open_output(out_path);
    out << rep.str();
  }
  return 0;
}

struct SweepRow {
  double value = 0.0;
  double lhs = 0.0;
  double threshold = 0.0;
  std::string verdict;
  std::string note;
};

int cmd_sweep(const config::ExperimentConfig& cfg, const std::string& param,
              double from, double to, int steps, bool table1,
              const std::string& out_path) {
  const auto t_start = std::chrono::steady_clock::now();
  const double threshold = 2.0 * modular::criterion_constant();
  auto out = open_output(out_path.empty() ? cfg.results_path : out_path);
  write_csv_preamble(out, cfg);

  if (table1) {
    out << "quantity,n_slits,value\n";
    std::cout << "Table I critical uncertainties (sigma_cm = 1.5 N d fixed for"
                 " row 1; sigma_rel = 0.1 d for row 2)\n";
    const std::vector<int> ns = {2, 3, 4, 5, 10, 20, 30};
    for (int n : ns) {
      try {
        const double v = observables::critical_sigma_rel(n, cfg.grating, cfg.frame);
        out << "sigma_rel_crit_over_d," << n << ','
            << io::format_double(v / cfg.grating.d) << "\n";
        std::cout << "sigma_rel_crit/d  N=" << n << ": " << v / cfg.grating.d
                  << "\n";
      } catch (const Error& e) {
        out << "sigma_rel_crit_over_d," << n << ",error:" << e.what() << "\n";
      }
      out.flush();
    }
    for (int n : ns) {
      if (n < 3) continue;
      try {
        const double v = observables::critical_sigma_cm(n, cfg.grating, cfg.frame);
        out << "sigma_cm_crit_over_Nd," << n << ','
            << io::format_double(v / (n * cfg.grating.d)) << "\n";
        std::cout << "sigma_cm_crit/(Nd)  N=" << n << ": "
                  << v / (n * cfg.grating.d) << "\n";
      } catch (const Error& e) {
        out << "sigma_cm_crit_over_Nd," << n << ",error:" << e.what() << "\n";
      }
      out.flush();
    }
    const auto dt = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t_start)
                        .count();
    std::cout << "table1 runtime: " << dt << " s\n";
    return 0;
  }

  if (steps < 1) throw_error(ErrorKind::config, "sweep: steps must be >= 1");
  out << "parameter,value,lhs,threshold,verdict,note\n";
  const double dh = cfg.frame.d / cfg.frame.h;
  std::vector<SweepRow> rows(steps);
  for (int i = 0; i < steps; ++i) {
    SweepRow row;
    row.value = (steps == 1) ? from : from + (to - from) * i / (steps - 1);
    row.threshold = threshold;
    try {
      if (param == "w") {
        row.lhs = dh * dh *
                  observables::mixture_variance_ptot(cfg.grating.n_slits,
                                                     row.value, cfg.frame);
      } else if (param == "phi") {
        row.lhs = dh * dh *
                  observables::ideal_variance_ptot_shifted(cfg.grating.n_slits,
                                                           row.value, cfg.frame);
      } else if (param == "s0_p_cm") {
        const auto [xi_cm, xi_rel] = states::dispersion_factors(
            cfg.source, cfg.source.t_grating, cfg.frame.hbar());
        (void)xi_rel;
        row.lhs = dh * dh *
                  observables::extended_source_variance_ptot(
                      cfg.grating.n_slits, cfg.frame, row.value, std::abs(xi_cm));
      } else if (param == "N") {
        const int n = static_cast<int>(row.value);
        row.lhs = dh * dh * observables::ideal_variance_ptot(n, cfg.frame);
      } else if (param == "sigma_rel") {
        states::EprSource src(row.value, cfg.source.sigma_x_cm, cfg.source.mass,
                              cfg.source.t_grating);
        row.lhs = observables::criterion_lhs_suboptimal(src, cfg.grating, cfg.frame);
      } else if (param == "sigma_cm") {
        states::EprSource src(cfg.source.sigma_x_rel, row.value, cfg.source.mass,
                              cfg.source.t_grating);
        row.lhs = observables::criterion_lhs_suboptimal(src, cfg.grating, cfg.frame);
      } else {
        throw_error(ErrorKind::config,
                    "sweep: unknown parameter '" + param +
                        "' (expect sigma_rel, sigma_cm, w, phi, s0_p_cm, N)");
      }
      row.verdict = row.lhs < row.threshold ? "entangled" : "not_detected";
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::config) throw;  // bad sweep spec, not a row error
      row.verdict = "error";
      row.note = e.what();
    }
    rows[i] = row;
  }
  for (const auto& row : rows) {
    out << param << ',' << io::format_double(row.value) << ','
        << io::format_double(row.lhs) << ',' << io::format_double(row.threshold)
        << ',' << row.verdict << ',' << row.note << "\n";
    std::cout << param << " = " << row.value << ": lhs = " << row.lhs << " ("
              << row.verdict << ")\n";
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Nonlocal double-grating interference simulator"};
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("-j,--jobs", jobs, "worker threads (or NLYOUNG_JOBS)");

  std::string config_path;
  std::string out_path;
  std::string plane = "far";
  int grid = 128;
  std::vector<std::string> event_paths;
  bool auto_phase = false;
  double frame_d = 1.0, frame_h = 2.0 * kPi;
  int hist_bins = 128;
  std::string sweep_param;
  double sweep_from = 0.0, sweep_to = 1.0;
  int sweep_steps = 11;
  bool table1 = false;

  auto* validate = app.add_subcommand("validate", "check setup conditions");
  validate->add_option("-c,--config", config_path, "config file");

  auto* pattern = app.add_subcommand("pattern", "tabulate interference patterns");
  pattern->add_option("-c,--config", config_path, "config file");
  pattern->add_option("--plane", plane, "near or far");
  pattern->add_option("--grid", grid, "points per axis");
  pattern->add_option("-o,--output", out_path, "output CSV")->required();

  auto* sample = app.add_subcommand("sample", "generate coincidence events");
  sample->add_option("-c,--config", config_path, "config file");
  sample->add_option("-o,--output", out_path, "event file");

  auto* analyze = app.add_subcommand("analyze", "estimate the criterion from events");
  analyze->add_option("events", event_paths, "event files")->required();
  analyze->add_flag("--auto-phase", auto_phase, "fit the phase origin");
  analyze->add_option("--frame-d", frame_d, "slit separation d");
  analyze->add_option("--frame-h", frame_h, "Planck constant h");
  analyze->add_option("--hist-bins", hist_bins, "histogram bins");
  analyze->add_option("-o,--output", out_path, "report file");

  auto* sweep = app.add_subcommand("sweep", "parameter sweeps and Table presets");
  sweep->add_option("-c,--config", config_path, "config file");
  sweep->add_option("--param", sweep_param, "sigma_rel|sigma_cm|w|phi|s0_p_cm|N");
  sweep->add_option("--from", sweep_from, "sweep start");
  sweep->add_option("--to", sweep_to, "sweep end");
  sweep->add_option("--steps", sweep_steps, "sweep points");
  sweep->add_flag("--table1", table1, "critical-uncertainty preset");
  sweep->add_option("-o,--output", out_path, "results CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    apply_jobs(jobs);
    config::ExperimentConfig cfg =
        config_path.empty() ? config::default_config()
                            : config::load_config(config_path);
    if (validate->parsed()) return cmd_validate(cfg);
    if (pattern->parsed()) return cmd_pattern(cfg, plane, grid, out_path);
    if (sample->parsed())
      return cmd_sample(cfg, out_path.empty() ? cfg.events_path : out_path);
    if (analyze->parsed())
      return cmd_analyze(event_paths, frame_d, frame_h, auto_phase, hist_bins,
                         out_path);
    if (sweep->parsed()) {
      if (!table1 && sweep_param.empty())
        throw_error(ErrorKind::config, "sweep: need --param or --table1");
      return cmd_sweep(cfg, sweep_param, sweep_from, sweep_to, sweep_steps,
                       table1, out_path);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace nly::cli
