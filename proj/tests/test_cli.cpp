#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"

#include "resbound/cli/commands.hpp"
#include "resbound/cli/config.hpp"
#include "resbound/cli/csv.hpp"

using namespace resbound;
using namespace resbound::cli;

namespace {

std::string config_error_path(const std::string& text, const std::vector<std::string>& overrides) {
  try {
    load_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "";
}

std::size_t column(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) return i;
  }
  FAIL("missing column " << name);
  return 0;
}

double cell(const CsvTable& t, std::size_t row, const std::string& name) {
  return parse_number(t.rows[row][column(t, name)]);
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("resbound_cli_test_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("number formatting round-trips") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1e-12) == "1e-12");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(std::isinf(parse_number("inf")));
  CHECK(std::isnan(parse_number("nan")));
  CHECK_THROWS_AS(parse_number("1.5x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_number(""), std::invalid_argument);

  std::mt19937_64 rng(99);
  for (int k = 0; k < 20000; ++k) {
    std::uint64_t bits = rng();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    if (std::isnan(v)) continue;
    const std::string text = format_number(v);
    const double back = parse_number(text);
    CHECK(std::memcmp(&back, &v, sizeof v) == 0);
    CHECK(format_number(back) == text);
  }
}

TEST_CASE("CSV round trip") {
  CsvTable t;
  t.metadata = {"resbound test", "note: a, b"};
  t.header = {"x", "y"};
  t.add_row(std::vector<double>{1.0, 0.1});
  t.add_row(std::vector<double>{std::numeric_limits<double>::infinity(), -2e-300});
  t.add_row(std::vector<std::string>{"label", "nan"});
  const std::string text = to_csv(t);
  CHECK(text.rfind("# resbound test\n# note: a, b\nx,y\n1,0.1\n", 0) == 0);
  const CsvTable back = parse_csv(text);
  CHECK(back.metadata == t.metadata);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(to_csv(back) == text);
  CHECK_THROWS_AS(parse_csv("a,b\n1\n"), std::invalid_argument);
}

TEST_CASE("file writing refuses to overwrite") {
  TempDir dir;
  const std::string path = (dir.path / "sub" / "f.txt").string();
  write_file(path, "one", false);
  CHECK(read_file(path) == "one");
  CHECK_THROWS(write_file(path, "two", false));
  write_file(path, "two", true);
  CHECK(read_file(path) == "two");
}

TEST_CASE("configuration defaults and overrides") {
  const RunConfig c = load_config("", {});
  CHECK(c.s == 2.0);
  CHECK(c.losses.eta_r == 1.0);
  CHECK(c.lineshape.family == "lorentzian");
  CHECK(c.lineshape.T_res == 1.0);
  CHECK(c.search.lambda_min == -3.0);
  CHECK(c.search.step == 1e-3);
  CHECK(c.fom_map.grid_n == 101);
  CHECK(c.max_vs_s.count == 61);
  CHECK(c.fft.samples == (1u << 20));

  const RunConfig o = load_config(R"({"probe": {"s": 1.5}, "losses": {"eta_r": 0.8}})",
                                  {"probe.s=1", "lineshape.family=butterworth", "output.dir=\"out\""});
  CHECK(o.s == 1.0);
  CHECK(o.losses.eta_r == 0.8);
  CHECK(o.lineshape.family == "butterworth");
  CHECK(o.output_dir == "out");
  CHECK(o.resolved["probe"]["s"] == 1);
  CHECK_FALSE(o.make_lineshape().is_lorentzian());
}

TEST_CASE("configuration errors carry the field path") {
  CHECK(config_error_path("", {"losses.eta_r=1.5"}) == "losses.eta_r");
  CHECK(config_error_path("", {"losses.foo=1"}) == "losses.foo");
  CHECK(config_error_path("", {"probe.s=-1"}) == "probe.s");
  CHECK(config_error_path("", {"probe.s=\"big\""}) == "probe.s");
  CHECK(config_error_path("", {"lineshape.T_off=1"}) != "");
  CHECK(config_error_path("", {"lineshape.family=gaussian"}) == "lineshape.family");
  CHECK(config_error_path("", {"fft.samples=1000"}) == "fft.samples");
  CHECK(config_error_path("", {"search.step=0"}) == "search.step");
  CHECK(config_error_path("", {"fom_map.grid_n=1"}) == "fom_map.grid_n");
  CHECK(config_error_path("{\"probe\": {\"t\": 1}}", {}) == "probe.t");
  CHECK(config_error_path("{not json", {}) == "<config>");
  CHECK(config_error_path("", {"no_equals"}) != "");
  CHECK(config_error_path("", {"lineshape.family=butterworth", "search.lambda_max=4"}) != "");
}

TEST_CASE("bounds command") {
  const CommandOutput out = cmd_bounds(load_config("", {}));
  const CsvTable& t = out.table;
  CHECK(t.rows.size() == 77);
  bool saw_qef = false, saw_inf = false;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double s = cell(t, r, "s"), T = cell(t, r, "T");
    if (s == 2.0 && T == 1.0) {
      CHECK(cell(t, r, "QEF") == doctest::Approx(27.31).epsilon(1e-4));
      saw_qef = true;
    }
    if (s == 0.0) {
      CHECK(t.rows[r][column(t, "qcrb_T_btmss")] == t.rows[r][column(t, "qcrb_T_coherent")]);
      CHECK(t.rows[r][column(t, "qcrb_phi_btmss")] == t.rows[r][column(t, "qcrb_phi_coherent")]);
    }
    if (T == 0.0) {
      CHECK(t.rows[r][column(t, "qcrb_phi_btmss")] == "inf");
      CHECK(cell(t, r, "QEF") == 1.0);
      saw_inf = true;
    }
  }
  CHECK(saw_qef);
  CHECK(saw_inf);
  CHECK(out.sidecar["config"] == load_config("", {}).resolved);
  CHECK(out.sidecar["version"] == version());
}

TEST_CASE("sensitivity-curve command") {
  const CommandOutput peak = cmd_sensitivity_curve(load_config("", {}));
  CHECK(peak.table.rows.size() == 6001);
  CHECK(peak.sidecar["maxima"]["phase"]["s_max_per_photon"].get<double>() ==
        doctest::Approx(109.24).epsilon(1e-4));
  const CommandOutput dip = cmd_sensitivity_curve(
      load_config("", {"lineshape.T_res=0", "lineshape.T_off=1", "search.step=0.01"}));
  std::size_t zero = 300;
  CHECK(cell(dip.table, zero, "lambda") == 0.0);
  CHECK(cell(dip.table, zero, "S_T_per_photon") == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("max-vs-s command") {
  const CommandOutput out =
      cmd_max_vs_s(load_config("", {"max_vs_s.count=7", "search.step=0.01"}));
  const CsvTable& t = out.table;
  REQUIRE(t.rows.size() == 7);
  for (std::size_t r = 1; r < t.rows.size(); ++r) {
    CHECK(cell(t, r, "S_T_max") >= cell(t, r - 1, "S_T_max"));
    CHECK(cell(t, r, "S_phi_max") >= cell(t, r - 1, "S_phi_max"));
  }
  CHECK(cell(t, 0, "S_T_max") == doctest::Approx(cell(t, 0, "S_T_coherent")).epsilon(1e-12));
  CHECK(cell(t, 0, "S_phi_max") == doctest::Approx(cell(t, 0, "S_phi_coherent")).epsilon(1e-12));

  const CommandOutput dip = cmd_max_vs_s(
      load_config("", {"max_vs_s.count=4", "search.step=0.01", "lineshape.T_res=0", "lineshape.T_off=1"}));
  for (std::size_t r = 0; r < dip.table.rows.size(); ++r) {
    CHECK(cell(dip.table, r, "S_T_max") == doctest::Approx(4.0).epsilon(1e-6));
  }
}

TEST_CASE("fom-map command") {
  const CommandOutput out = cmd_fom_map(load_config("", {"fom_map.grid_n=5", "search.step=0.01"}));
  const CsvTable& t = out.table;
  REQUIRE(t.rows.size() == 5);
  CHECK(t.header.size() == 6);
  for (std::size_t i = 0; i < 5; ++i) CHECK(t.rows[i][i + 1] == "nan");
  CHECK(out.sidecar["cells_below_one"] == 0);
  CHECK(out.sidecar["diagonal_sentinel"] == "nan");
}

TEST_CASE("eqef-sweep command") {
  const CommandOutput out =
      cmd_eqef_sweep(load_config("", {"eqef_sweep.samples=11", "search.step=0.01"}));
  CHECK(out.table.rows.size() == 11);
  CHECK(out.sidecar["reference_crossing"]["phase"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(out.sidecar["monotone"]["T_probe"] == true);

  const CommandOutput dip = cmd_eqef_sweep(load_config(
      "", {"eqef_sweep.samples=5", "search.step=0.01", "lineshape.T_res=0", "lineshape.T_off=1"}));
  for (std::size_t r = 0; r < dip.table.rows.size(); ++r) {
    CHECK(cell(dip.table, r, dip.table.header[1]) == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(dip.sidecar["reference_crossing"]["transmission"].is_null());
}

TEST_CASE("kk-phase command") {
  const CommandOutput out = cmd_kk_phase(load_config("", {"kk_phase.step=0.1"}));
  CHECK(out.passed);
  CHECK(out.table.rows.size() == 61);
  CHECK(out.sidecar["max_abs_error_vs_analytic"].get<double>() < 1e-3);
  bool flagged = false;
  for (const auto& m : out.table.metadata) flagged |= m.rfind("trusted range", 0) == 0;
  CHECK(flagged);

  const CommandOutput strict = cmd_kk_phase(load_config(
      "", {"kk_phase.step=0.5", "lineshape.family=butterworth", "lineshape.T_res=0.9",
           "lineshape.T_off=0.1", "kk_phase.max_discrepancy=1e-12"}));
  CHECK_FALSE(strict.passed);
}

TEST_CASE("verify command") {
  const std::vector<std::string> small = {"verify.oracle.s=[0, 1]",   "verify.oracle.T=[0.3, 1]",
                                          "verify.saturation.s=[0, 2]", "verify.saturation.T=[0.5]"};
  const CommandOutput out = cmd_verify(load_config("", small));
  CHECK(out.passed);
  CHECK(out.sidecar["saturation"]["max_residual"].get<double>() < 1e-10);
  for (std::size_t r = 0; r < out.table.rows.size(); ++r) {
    if (out.table.rows[r][0] == "oracle" && out.table.rows[r][2] == "0") {
      // The transmission engine differentiates d by a central difference with
      // step 1e-6, which leaves a roundoff floor near 1.3e-9.
      CHECK(cell(out.table, r, "residual") < (out.table.rows[r][1] == "phase" ? 1e-9 : 1e-8));
    }
  }
  std::vector<std::string> failing = small;
  failing.push_back("verify.oracle.phase_tolerance=1e-30");
  CHECK_FALSE(cmd_verify(load_config("", failing)).passed);
}

TEST_CASE("execute writes outputs once") {
  TempDir dir;
  const RunConfig cfg = load_config("", {"output.dir=\"" + dir.path.string() + "\"", "bounds.T_count=3"});
  std::ostringstream log;
  CHECK(execute("bounds", cfg, false, log) == 0);
  CHECK(std::filesystem::exists(dir.path / "bounds.csv"));
  CHECK(std::filesystem::exists(dir.path / "bounds.json"));
  const std::string first = read_file((dir.path / "bounds.csv").string());
  CHECK(to_csv(parse_csv(first)) == first);
  CHECK_THROWS(execute("bounds", cfg, false, log));
  CHECK(execute("bounds", cfg, true, log) == 0);
  CHECK(read_file((dir.path / "bounds.csv").string()) == first);
  CHECK_THROWS_AS(run_command("nope", cfg), std::invalid_argument);
  CHECK(command_names().size() == 7);
}

}  // TEST_SUITE
