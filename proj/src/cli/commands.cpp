#include "resbound/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include "resbound/bounds.hpp"
#include "resbound/numerics.hpp"

#ifndef RESBOUND_VERSION
#define RESBOUND_VERSION "unknown"
#endif

namespace resbound::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// JSON has no inf/nan; such values are written as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

CsvTable start_table(const std::string& command, std::vector<std::string> header) {
  CsvTable t;
  t.metadata.push_back(std::string("resbound ") + version());
  t.metadata.push_back("command: " + command);
  t.header = std::move(header);
  return t;
}

json start_sidecar(const std::string& command, const RunConfig& cfg) {
  return json{{"command", command}, {"version", version()}, {"config", cfg.resolved}};
}

json search_json(const SearchOptions& s) {
  return json{{"lambda_min", s.lambda_min},
              {"lambda_max", s.lambda_max},
              {"step", s.step},
              {"tolerance", s.tolerance}};
}

json result_json(const SensitivityResult& r, double display_N) {
  return json{{"lambda_star", r.lambda_star},
              {"s_max_per_photon", r.s_max_per_photon},
              {"s_max_at_display_N", r.s_max_per_photon * display_N},
              {"removable_substitution", r.substituted}};
}

SensitivityQuery query(Estimand e, const Probe& p, const LossBudget& l) { return {e, p, l}; }

}  // namespace

const char* version() { return RESBOUND_VERSION; }

CommandOutput cmd_bounds(const RunConfig& cfg) {
  CommandOutput out;
  out.table = start_table("bounds", {"s", "T", "N", "D_r", "qcrb_T_btmss", "qcrb_phi_btmss",
                                     "qcrb_T_coherent", "qcrb_phi_coherent", "QEF",
                                     "squeezing_dB"});
  const std::vector<double> Ts = linspace(cfg.bounds.T_min, cfg.bounds.T_max, cfg.bounds.T_count);
  for (double s : cfg.bounds.s_values) {
    for (double T : Ts) {
      BoundQuery q;
      q.T = T;
      q.N = cfg.bounds.N;
      q.losses = cfg.losses;
      auto eval = [&](Estimand e, Probe p) {
        q.estimand = e;
        q.probe = p;
        return qcrb(q);
      };
      out.table.add_row(std::vector<double>{
          s, T, cfg.bounds.N, d_r(cfg.losses.eta_r, s),
          eval(Estimand::transmission, Probe::btmss(s)), eval(Estimand::phase, Probe::btmss(s)),
          eval(Estimand::transmission, Probe::coherent()), eval(Estimand::phase, Probe::coherent()),
          qef(T, s, cfg.losses), squeezing_db(s)});
    }
  }
  out.sidecar = start_sidecar("bounds", cfg);
  out.sidecar["grid"] = {{"T", Ts}, {"s", cfg.bounds.s_values}};
  out.sidecar["rows"] = out.table.rows.size();
  return out;
}

CommandOutput cmd_sensitivity_curve(const RunConfig& cfg) {
  const TransferFunction tf(cfg.make_lineshape(), cfg.fft);
  const Probe probe = Probe::btmss(cfg.s);
  const SensitivityResult rt = max_sensitivity(tf, query(Estimand::transmission, probe, cfg.losses), cfg.search);
  const SensitivityResult rp = max_sensitivity(tf, query(Estimand::phase, probe, cfg.losses), cfg.search);

  CommandOutput out;
  out.table = start_table("sensitivity-curve", {"lambda", "S_T_per_photon", "S_phi_per_photon", "T", "phi"});
  out.table.metadata.push_back("lineshape: " + tf.spec().describe());
  for (std::size_t i = 0; i < rt.lambda.size(); ++i) {
    const double L = rt.lambda[i];
    out.table.add_row(std::vector<double>{L, rt.curve[i], rp.curve[i], tf.transmission(L), tf.phase(L)});
  }
  out.sidecar = start_sidecar("sensitivity-curve", cfg);
  out.sidecar["grid"] = search_json(cfg.search);
  out.sidecar["lineshape"] = tf.spec().describe();
  out.sidecar["analytic_phase"] = tf.analytic_phase();
  out.sidecar["display_N"] = cfg.display_N;
  out.sidecar["maxima"] = {{"transmission", result_json(rt, cfg.display_N)},
                           {"phase", result_json(rp, cfg.display_N)}};
  return out;
}

CommandOutput cmd_max_vs_s(const RunConfig& cfg) {
  const TransferFunction tf(cfg.make_lineshape(), cfg.fft);
  const std::vector<double> ss = linspace(cfg.max_vs_s.s_min, cfg.max_vs_s.s_max, cfg.max_vs_s.count);
  SearchOptions opts = cfg.search;
  opts.keep_curve = false;
  const double coh_t =
      max_sensitivity(tf, query(Estimand::transmission, Probe::coherent(), cfg.losses), opts).s_max_per_photon;
  const double coh_p =
      max_sensitivity(tf, query(Estimand::phase, Probe::coherent(), cfg.losses), opts).s_max_per_photon;

  std::vector<SensitivityResult> rt(ss.size()), rp(ss.size());
  numerics::parallel_for(ss.size(), [&](std::size_t i) {
    rt[i] = max_sensitivity(tf, query(Estimand::transmission, Probe::btmss(ss[i]), cfg.losses), opts);
    rp[i] = max_sensitivity(tf, query(Estimand::phase, Probe::btmss(ss[i]), cfg.losses), opts);
  });

  CommandOutput out;
  out.table = start_table("max-vs-s", {"s", "lambda_star_T", "S_T_max", "lambda_star_phi",
                                       "S_phi_max", "S_T_coherent", "S_phi_coherent"});
  out.table.metadata.push_back("lineshape: " + tf.spec().describe());
  for (std::size_t i = 0; i < ss.size(); ++i) {
    out.table.add_row(std::vector<double>{ss[i], rt[i].lambda_star, rt[i].s_max_per_photon,
                                          rp[i].lambda_star, rp[i].s_max_per_photon, coh_t, coh_p});
  }
  out.sidecar = start_sidecar("max-vs-s", cfg);
  out.sidecar["grid"] = {{"s", ss}, {"search", search_json(cfg.search)}};
  out.sidecar["lineshape"] = tf.spec().describe();
  out.sidecar["coherent"] = {{"transmission", coh_t}, {"phase", coh_p}};
  return out;
}

CommandOutput cmd_fom_map(const RunConfig& cfg) {
  const auto n = static_cast<std::size_t>(cfg.fom_map.grid_n);
  const FomMap map = fom_map(cfg.fom_map.order, cfg.s, cfg.losses, n, cfg.search, cfg.fft);

  CommandOutput out;
  std::vector<std::string> header = {"T_res"};
  for (double v : map.axis) header.push_back(format_number(v));
  out.table = start_table("fom-map", std::move(header));
  out.table.metadata.push_back("rows: T_res; columns: T_off; nan marks the flat-response diagonal");
  std::size_t below = 0;
  double min_value = std::numeric_limits<double>::infinity();
  std::pair<double, double> min_at{kNaN, kNaN};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row = {map.axis[i]};
    for (std::size_t j = 0; j < n; ++j) {
      const double v = map.at(i, j);
      row.push_back(v);
      if (std::isnan(v)) continue;
      if (v < 1.0) ++below;
      if (v < min_value) {
        min_value = v;
        min_at = {map.axis[i], map.axis[j]};
      }
    }
    out.table.add_row(row);
  }
  json contours = json::array();
  for (const Polyline& line : map.contours) {
    json pts = json::array();
    for (const auto& [tr, to] : line) pts.push_back({tr, to});
    contours.push_back(pts);
  }
  out.sidecar = start_sidecar("fom-map", cfg);
  out.sidecar["grid"] = {{"n", n}, {"axis", map.axis}, {"search", search_json(cfg.search)}};
  out.sidecar["lineshape_order"] = cfg.fom_map.order;
  out.sidecar["diagonal_sentinel"] = "nan";
  out.sidecar["contour_level"] = 1.0;
  out.sidecar["contours"] = contours;
  out.sidecar["cells_below_one"] = below;
  out.sidecar["minimum"] = {{"fom", number_or_null(min_value)}, {"T_res", number_or_null(min_at.first)},
                            {"T_off", number_or_null(min_at.second)}};
  return out;
}

CommandOutput cmd_eqef_sweep(const RunConfig& cfg) {
  const TransferFunction tf(cfg.make_lineshape(), cfg.fft);
  const auto samples = static_cast<std::size_t>(cfg.eqef_sweep.samples);
  const double eta_min = cfg.eqef_sweep.eta_min;
  const EqefSweep tp = eqef_loss_sweep(tf, Estimand::transmission, cfg.s, LossSweep::probe, samples, cfg.search, eta_min);
  const EqefSweep pp = eqef_loss_sweep(tf, Estimand::phase, cfg.s, LossSweep::probe, samples, cfg.search, eta_min);
  const EqefSweep tr = eqef_loss_sweep(tf, Estimand::transmission, cfg.s, LossSweep::reference, samples, cfg.search, eta_min);
  const EqefSweep pr = eqef_loss_sweep(tf, Estimand::phase, cfg.s, LossSweep::reference, samples, cfg.search, eta_min);

  CommandOutput out;
  out.table = start_table("eqef-sweep", {"eta", "EQEF_T_probe", "EQEF_phi_probe",
                                         "EQEF_T_reference", "EQEF_phi_reference"});
  out.table.metadata.push_back("lineshape: " + tf.spec().describe());
  out.table.metadata.push_back("probe sweep: eta_p1 = eta, eta_p2 = eta_r = 1; reference sweep: eta_r = eta");
  for (std::size_t i = 0; i < samples; ++i) {
    out.table.add_row(std::vector<double>{tp.eta[i], tp.eqef[i], pp.eqef[i], tr.eqef[i], pr.eqef[i]});
  }
  auto crossing = [&](Estimand e) {
    const auto c = reference_crossing(tf, e, cfg.s, eta_min, 1.0, 1e-10, cfg.search);
    return c ? json(*c) : json(nullptr);
  };
  out.sidecar = start_sidecar("eqef-sweep", cfg);
  out.sidecar["grid"] = {{"eta", tp.eta}, {"search", search_json(cfg.search)}};
  out.sidecar["lineshape"] = tf.spec().describe();
  out.sidecar["monotone"] = {{"T_probe", tp.monotone}, {"phi_probe", pp.monotone},
                             {"T_reference", tr.monotone}, {"phi_reference", pr.monotone}};
  out.sidecar["reference_crossing"] = {{"transmission", crossing(Estimand::transmission)},
                                       {"phase", crossing(Estimand::phase)}};
  return out;
}

CommandOutput cmd_kk_phase(const RunConfig& cfg) {
  const LineshapeSpec spec = cfg.make_lineshape();
  const PhaseSpectrum fft =
      minimum_phase_fft([&spec](double L) { return spec.transmission(L); }, cfg.fft);
  KernelOptions kopt;
  kopt.abs_tol = cfg.kk_phase.kernel_abs_tol;
  kopt.floor = cfg.fft.floor > 0.0 ? cfg.fft.floor : kTransmissionFloor;
  const double trusted = cfg.fft.trusted;
  const auto count = static_cast<int>(std::floor(2.0 * trusted / cfg.kk_phase.step + 1e-9)) + 1;
  std::vector<double> Ls(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Ls[static_cast<std::size_t>(i)] = std::min(-trusted + i * cfg.kk_phase.step, trusted);
  }
  std::vector<double> kernel(Ls.size());
  numerics::parallel_for(Ls.size(), [&](std::size_t i) { kernel[i] = minimum_phase_kernel(Ls[i], spec, kopt); });

  CommandOutput out;
  out.table = start_table("kk-phase", {"lambda", "T", "phi_fft", "phi_kernel", "abs_diff", "phi_analytic"});
  out.table.metadata.push_back("lineshape: " + spec.describe());
  out.table.metadata.push_back("trusted range: " + format_number(-trusted) + " to " +
                               format_number(trusted));
  out.table.metadata.push_back("transmission floor: " + format_number(fft.floor_value()) +
                               (fft.floor_applied() ? " (applied)" : " (not reached)"));
  double max_diff = 0.0;
  double max_analytic = spec.is_lorentzian() ? 0.0 : kNaN;
  for (std::size_t i = 0; i < Ls.size(); ++i) {
    const double L = Ls[i];
    const double pf = fft(L);
    const double diff = std::abs(pf - kernel[i]);
    const double analytic = spec.is_lorentzian() ? lorentzian_phase(L, spec.T_res(), spec.T_off()) : kNaN;
    if (!(diff <= max_diff)) max_diff = diff;
    if (spec.is_lorentzian()) max_analytic = std::max(max_analytic, std::abs(pf - analytic));
    out.table.add_row(std::vector<double>{L, spec.transmission(L), pf, kernel[i], diff, analytic});
  }
  out.passed = max_diff <= cfg.kk_phase.max_discrepancy;
  out.sidecar = start_sidecar("kk-phase", cfg);
  out.sidecar["grid"] = {{"lambda_min", -trusted}, {"lambda_max", trusted}, {"step", cfg.kk_phase.step},
                         {"fft_samples", cfg.fft.samples}, {"fft_half_range", cfg.fft.half_range}};
  out.sidecar["trusted_range"] = {-trusted, trusted};
  out.sidecar["transmission_floor"] = {{"value", fft.floor_value()}, {"applied", fft.floor_applied()}};
  out.sidecar["max_abs_diff"] = number_or_null(max_diff);
  out.sidecar["max_abs_error_vs_analytic"] = number_or_null(max_analytic);
  out.sidecar["threshold"] = cfg.kk_phase.max_discrepancy;
  out.sidecar["passed"] = out.passed;
  return out;
}

CommandOutput cmd_verify(const RunConfig& cfg) {
  const OracleReport oracle = run_oracle_grid(cfg.verify.oracle);
  const SaturationReport sat = verify_saturation(cfg.verify.saturation);

  CommandOutput out;
  out.table = start_table("verify", {"check", "estimand", "s", "T", "eta_p1", "eta_p2", "eta_r",
                                     "value", "reference", "residual", "residual_total_photons"});
  for (const OraclePoint& p : oracle.points) {
    out.table.add_row({"oracle", std::string(to_string(p.estimand)), format_number(p.s),
                       format_number(p.T), format_number(p.losses.eta_p1),
                       format_number(p.losses.eta_p2), format_number(p.losses.eta_r),
                       format_number(p.engine), format_number(p.closed_seeded),
                       format_number(p.residual_seeded), format_number(p.residual_total)});
  }
  for (const SaturationPoint& p : sat.points) {
    out.table.add_row({"saturation", std::string(to_string(p.estimand)), format_number(p.s),
                       format_number(p.T), format_number(p.losses.eta_p1),
                       format_number(p.losses.eta_p2), format_number(p.losses.eta_r),
                       format_number(p.hd_variance), format_number(p.qcrb),
                       format_number(p.residual), "nan"});
  }
  const double phase_max = oracle.max_residual_seeded(Estimand::phase);
  const double trans_max = oracle.max_residual_seeded(Estimand::transmission);
  const double trans_total = oracle.max_residual_total(Estimand::transmission);
  const bool phase_ok = phase_max <= cfg.verify.phase_tolerance;
  const bool trans_ok = trans_max <= cfg.verify.transmission_tolerance &&
                        trans_total <= cfg.verify.transmission_tolerance;
  const bool sat_ok = sat.max_residual <= cfg.verify.saturation_tolerance;
  out.passed = phase_ok && trans_ok && sat_ok;

  out.sidecar = start_sidecar("verify", cfg);
  out.sidecar["oracle"] = {
      {"points", oracle.points.size()},
      {"phase", {{"max_residual", number_or_null(phase_max)},
                 {"max_residual_total_photons", number_or_null(oracle.max_residual_total(Estimand::phase))},
                 {"threshold", cfg.verify.phase_tolerance},
                 {"passed", phase_ok}}},
      {"transmission", {{"max_residual", number_or_null(trans_max)},
                        {"max_residual_total_photons", number_or_null(trans_total)},
                        {"threshold", cfg.verify.transmission_tolerance},
                        {"passed", trans_ok}}}};
  out.sidecar["saturation"] = {{"points", sat.points.size()},
                               {"max_residual", number_or_null(sat.max_residual)},
                               {"threshold", cfg.verify.saturation_tolerance},
                               {"passed", sat_ok}};
  out.sidecar["passed"] = out.passed;
  return out;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"bounds", "sensitivity-curve", "max-vs-s", "fom-map",
                                                 "eqef-sweep", "kk-phase", "verify"};
  return names;
}

CommandOutput run_command(const std::string& name, const RunConfig& cfg) {
  if (name == "bounds") return cmd_bounds(cfg);
  if (name == "sensitivity-curve") return cmd_sensitivity_curve(cfg);
  if (name == "max-vs-s") return cmd_max_vs_s(cfg);
  if (name == "fom-map") return cmd_fom_map(cfg);
  if (name == "eqef-sweep") return cmd_eqef_sweep(cfg);
  if (name == "kk-phase") return cmd_kk_phase(cfg);
  if (name == "verify") return cmd_verify(cfg);
  throw std::invalid_argument("unknown command: " + name);
}

int execute(const std::string& name, const RunConfig& cfg, bool overwrite, std::ostream& log) {
  std::string stem = cfg.stem;
  if (stem.empty()) {
    stem = name;
    std::replace(stem.begin(), stem.end(), '-', '_');
  }
  const std::filesystem::path dir(cfg.output_dir);
  const std::string csv_path = (dir / (stem + ".csv")).string();
  const std::string json_path = (dir / (stem + ".json")).string();
  if (!overwrite) {
    for (const std::string& p : {csv_path, json_path}) {
      if (std::filesystem::exists(p)) {
        throw std::runtime_error(p + " exists; pass --force to overwrite");
      }
    }
  }
  const CommandOutput out = run_command(name, cfg);
  write_file(csv_path, to_csv(out.table), overwrite);
  write_file(json_path, out.sidecar.dump(2) + "\n", overwrite);
  log << "wrote " << csv_path << " (" << out.table.rows.size() << " rows) and " << json_path << "\n";
  if (!out.passed) log << name << ": verification FAILED, see " << json_path << "\n";
  return out.passed ? 0 : 1;
}

}  // namespace resbound::cli
