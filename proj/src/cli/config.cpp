#include "resbound/cli/config.hpp"

#include <cmath>
#include <sstream>

namespace resbound::cli {

using nlohmann::json;

namespace {

bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return true;
  return a.type() == b.type();
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void merge_strict(json& dst, const json& src, const std::string& prefix) {
  if (!src.is_object()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
  for (auto it = src.begin(); it != src.end(); ++it) {
    const std::string path = join(prefix, it.key());
    if (!dst.contains(it.key())) throw ConfigError(path, "unknown configuration key");
    json& slot = dst[it.key()];
    if (slot.is_object()) {
      merge_strict(slot, it.value(), path);
    } else if (!same_kind(slot, it.value())) {
      throw ConfigError(path, "expected " + std::string(slot.type_name()) + ", got " +
                                  it.value().type_name());
    } else {
      slot = it.value();
    }
  }
}

class Reader {
 public:
  explicit Reader(const json& root) : root_(root) {}

  const json& at(const std::string& path) const {
    const json* node = &root_;
    std::istringstream parts(path);
    std::string key;
    while (std::getline(parts, key, '.')) {
      if (!node->is_object() || !node->contains(key)) throw ConfigError(path, "missing key");
      node = &(*node)[key];
    }
    return *node;
  }

  double number(const std::string& path) const {
    const json& v = at(path);
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
    return d;
  }

  double number_in(const std::string& path, double lo, double hi, bool open_lo = false) const {
    const double d = number(path);
    if (d < lo || d > hi || (open_lo && d == lo)) {
      std::ostringstream os;
      os << "must lie in " << (open_lo ? "(" : "[") << lo << ", " << hi << "], got " << d;
      throw ConfigError(path, os.str());
    }
    return d;
  }

  double positive(const std::string& path) const {
    const double d = number(path);
    if (!(d > 0.0)) throw ConfigError(path, "must be > 0");
    return d;
  }

  int integer(const std::string& path, int lo, int hi) const {
    const double d = number(path);
    if (d != std::floor(d) || d < lo || d > hi) {
      throw ConfigError(path, "must be an integer in [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]");
    }
    return static_cast<int>(d);
  }

  std::string string(const std::string& path) const {
    const json& v = at(path);
    if (!v.is_string()) throw ConfigError(path, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& path, double lo, double hi,
                              bool open_lo = false) const {
    const json& v = at(path);
    if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a non-empty number array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string item = path + "[" + std::to_string(i) + "]";
      if (!v[i].is_number()) throw ConfigError(item, "expected a number");
      const double d = v[i].get<double>();
      if (!std::isfinite(d) || d < lo || d > hi || (open_lo && d == lo)) {
        std::ostringstream os;
        os << "must lie in " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
        throw ConfigError(item, os.str());
      }
      out.push_back(d);
    }
    return out;
  }

 private:
  const json& root_;
};

constexpr double kMaxSqueezing = 50.0;

}  // namespace

json default_config() {
  return json{
      {"output", {{"dir", "results"}, {"stem", ""}}},
      {"lineshape",
       {{"family", "lorentzian"}, {"order", 3}, {"T_res", 1.0}, {"T_off", 0.0}, {"table", ""}}},
      {"probe", {{"s", 2.0}}},
      {"losses", {{"eta_p1", 1.0}, {"eta_p2", 1.0}, {"eta_r", 1.0}}},
      {"display", {{"N", 1.0}}},
      {"search", {{"lambda_min", -3.0}, {"lambda_max", 3.0}, {"step", 1e-3}, {"tolerance", 1e-8}}},
      {"fft", {{"half_range", 1000.0}, {"samples", 1 << 20}, {"trusted", 3.0}, {"floor", 1e-12}}},
      {"bounds",
       {{"T_min", 0.0},
        {"T_max", 1.0},
        {"T_count", 11},
        {"s_values", {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0}},
        {"N", 1.0}}},
      {"max_vs_s", {{"s_min", 0.0}, {"s_max", 3.0}, {"count", 61}}},
      {"fom_map", {{"order", 1}, {"grid_n", 101}}},
      {"eqef_sweep", {{"samples", 100}, {"eta_min", kSweepEtaMin}}},
      {"kk_phase", {{"step", 0.01}, {"kernel_abs_tol", 1e-8}, {"max_discrepancy", 2e-3}}},
      {"verify",
       {{"oracle",
         {{"s", {0.0, 0.5, 1.0, 2.0}},
          {"T", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}},
          {"eta", {0.7, 1.0}},
          {"seeded_photons", 1e6},
          {"phi", 0.4},
          {"phase_tolerance", 1e-6},
          {"transmission_tolerance", 1e-3}}},
        {"saturation",
         {{"s", {0.0, 0.5, 1.0, 2.0}},
          {"T", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}},
          {"eta", {0.6, 0.8, 1.0}},
          {"alpha_mag", 30.0},
          {"beta_mag", 5.0},
          {"chi", 0.3},
          {"phi", 0.7},
          {"tolerance", 1e-10}}}}}};
}

void apply_override(json& cfg, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(assignment, "override must have the form key.path=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &cfg;
  std::istringstream parts(path);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(parts, key, '.')) keys.push_back(key);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!node->is_object() || !node->contains(keys[i])) {
      throw ConfigError(path, "unknown configuration key");
    }
    node = &(*node)[keys[i]];
  }
  if (node->is_object()) {
    merge_strict(*node, value, path);
    return;
  }
  if (!same_kind(*node, value)) {
    throw ConfigError(path, "expected " + std::string(node->type_name()) + ", got " +
                                value.type_name());
  }
  *node = value;
}

RunConfig load_config(const std::string& file_text, const std::vector<std::string>& overrides) {
  json cfg = default_config();
  if (!file_text.empty()) {
    json user = json::parse(file_text, nullptr, false, true);
    if (user.is_discarded()) throw ConfigError("<config>", "not valid JSON");
    merge_strict(cfg, user, "");
  }
  for (const std::string& o : overrides) apply_override(cfg, o);
  return parse_config(cfg);
}

RunConfig parse_config(const json& resolved) {
  const Reader r(resolved);
  RunConfig c;
  c.resolved = resolved;
  c.output_dir = r.string("output.dir");
  if (c.output_dir.empty()) throw ConfigError("output.dir", "must not be empty");
  c.stem = r.string("output.stem");
  if (c.stem.find('/') != std::string::npos) throw ConfigError("output.stem", "must not contain '/'");

  LineshapeConfig& ls = c.lineshape;
  ls.family = r.string("lineshape.family");
  if (ls.family != "lorentzian" && ls.family != "butterworth" && ls.family != "tabulated") {
    throw ConfigError("lineshape.family", "must be lorentzian, butterworth or tabulated");
  }
  ls.order = r.integer("lineshape.order", 1, 64);
  ls.T_res = r.number_in("lineshape.T_res", 0.0, 1.0);
  ls.T_off = r.number_in("lineshape.T_off", 0.0, 1.0);
  ls.table = r.string("lineshape.table");
  if (ls.family == "tabulated" && ls.table.empty()) {
    throw ConfigError("lineshape.table", "required for the tabulated family");
  }
  if (ls.family != "tabulated" && ls.T_res == ls.T_off) {
    throw ConfigError("lineshape.T_off", "must differ from T_res (flat response)");
  }

  c.s = r.number_in("probe.s", 0.0, kMaxSqueezing);
  c.losses.eta_p1 = r.number_in("losses.eta_p1", 0.0, 1.0, true);
  c.losses.eta_p2 = r.number_in("losses.eta_p2", 0.0, 1.0, true);
  c.losses.eta_r = r.number_in("losses.eta_r", 0.0, 1.0, true);
  c.display_N = r.positive("display.N");

  c.search.lambda_min = r.number("search.lambda_min");
  c.search.lambda_max = r.number("search.lambda_max");
  if (!(c.search.lambda_max > c.search.lambda_min)) {
    throw ConfigError("search.lambda_max", "must exceed search.lambda_min");
  }
  c.search.step = r.positive("search.step");
  if ((c.search.lambda_max - c.search.lambda_min) / c.search.step > 1e7) {
    throw ConfigError("search.step", "grid would exceed 1e7 points");
  }
  c.search.tolerance = r.positive("search.tolerance");

  c.fft.half_range = r.positive("fft.half_range");
  const int samples = r.integer("fft.samples", 16, 1 << 26);
  if ((samples & (samples - 1)) != 0) throw ConfigError("fft.samples", "must be a power of two");
  c.fft.samples = static_cast<std::size_t>(samples);
  c.fft.trusted = r.positive("fft.trusted");
  if (!(c.fft.trusted + 0.05 < c.fft.half_range)) {
    throw ConfigError("fft.half_range", "must exceed fft.trusted by more than 0.05");
  }
  c.fft.floor = r.number_in("fft.floor", 0.0, 0.5);
  const bool analytic_phase =
      ls.family == "lorentzian" || (ls.family == "butterworth" && ls.order == 1);
  if (!analytic_phase &&
      (c.search.lambda_min < -c.fft.trusted || c.search.lambda_max > c.fft.trusted)) {
    throw ConfigError("search.lambda_min",
                      "search range must lie inside [-fft.trusted, fft.trusted] for a "
                      "reconstructed phase");
  }

  c.bounds.T_min = r.number_in("bounds.T_min", 0.0, 1.0);
  c.bounds.T_max = r.number_in("bounds.T_max", 0.0, 1.0);
  if (c.bounds.T_max < c.bounds.T_min) throw ConfigError("bounds.T_max", "must be >= bounds.T_min");
  c.bounds.T_count = r.integer("bounds.T_count", 1, 1000000);
  if (c.bounds.T_count == 1 && c.bounds.T_max != c.bounds.T_min) {
    throw ConfigError("bounds.T_count", "must be >= 2 unless T_min == T_max");
  }
  c.bounds.s_values = r.numbers("bounds.s_values", 0.0, kMaxSqueezing);
  c.bounds.N = r.positive("bounds.N");

  c.max_vs_s.s_min = r.number_in("max_vs_s.s_min", 0.0, kMaxSqueezing);
  c.max_vs_s.s_max = r.number_in("max_vs_s.s_max", 0.0, kMaxSqueezing);
  if (!(c.max_vs_s.s_max > c.max_vs_s.s_min)) {
    throw ConfigError("max_vs_s.s_max", "must exceed max_vs_s.s_min");
  }
  c.max_vs_s.count = r.integer("max_vs_s.count", 2, 100000);

  c.fom_map.order = r.integer("fom_map.order", 1, 64);
  c.fom_map.grid_n = r.integer("fom_map.grid_n", 2, 2000);
  if (c.fom_map.order > 1 &&
      (c.search.lambda_min < -c.fft.trusted || c.search.lambda_max > c.fft.trusted)) {
    throw ConfigError("search.lambda_min",
                      "search range must lie inside [-fft.trusted, fft.trusted] for a "
                      "reconstructed phase");
  }

  c.eqef_sweep.samples = r.integer("eqef_sweep.samples", 2, 100000);
  c.eqef_sweep.eta_min = r.number_in("eqef_sweep.eta_min", 0.0, 1.0, true);
  if (c.eqef_sweep.eta_min == 1.0) throw ConfigError("eqef_sweep.eta_min", "must be < 1");

  c.kk_phase.step = r.positive("kk_phase.step");
  c.kk_phase.kernel_abs_tol = r.positive("kk_phase.kernel_abs_tol");
  c.kk_phase.max_discrepancy = r.positive("kk_phase.max_discrepancy");

  OracleGrid& og = c.verify.oracle;
  og.s = r.numbers("verify.oracle.s", 0.0, kMaxSqueezing);
  og.T = r.numbers("verify.oracle.T", 0.0, 1.0, true);
  og.eta = r.numbers("verify.oracle.eta", 0.0, 1.0, true);
  og.seeded_photons = r.positive("verify.oracle.seeded_photons");
  og.phi = r.number("verify.oracle.phi");
  c.verify.phase_tolerance = r.positive("verify.oracle.phase_tolerance");
  c.verify.transmission_tolerance = r.positive("verify.oracle.transmission_tolerance");

  SaturationGrid& sg = c.verify.saturation;
  sg.s = r.numbers("verify.saturation.s", 0.0, kMaxSqueezing);
  sg.T = r.numbers("verify.saturation.T", 0.0, 1.0, true);
  sg.eta = r.numbers("verify.saturation.eta", 0.0, 1.0, true);
  sg.alpha_mag = r.number_in("verify.saturation.alpha_mag", 0.0, 1e12);
  sg.beta_mag = r.number_in("verify.saturation.beta_mag", 0.0, 1e12);
  sg.chi = r.number("verify.saturation.chi");
  sg.phi = r.number("verify.saturation.phi");
  c.verify.saturation_tolerance = r.positive("verify.saturation.tolerance");
  return c;
}

LineshapeSpec RunConfig::make_lineshape() const {
  try {
    if (lineshape.family == "lorentzian") {
      return LineshapeSpec::lorentzian(lineshape.T_res, lineshape.T_off);
    }
    if (lineshape.family == "butterworth") {
      return LineshapeSpec::butterworth(lineshape.order, lineshape.T_res, lineshape.T_off);
    }
    Tabulated t = load_table(lineshape.table);
    return LineshapeSpec::tabulated(std::move(t.lambda), std::move(t.transmission));
  } catch (const std::exception& e) {
    throw ConfigError(lineshape.family == "tabulated" ? "lineshape.table" : "lineshape", e.what());
  }
}

}  // namespace resbound::cli
