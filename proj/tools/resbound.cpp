// resbound: sensitivity bounds for quantum-enhanced optical resonance sensors.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "resbound/cli/commands.hpp"
#include "resbound/cli/config.hpp"
#include "resbound/cli/csv.hpp"

namespace {

constexpr int kExitVerification = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace resbound::cli;

  CLI::App app{"Sensitivity bounds for quantum-enhanced optical resonance sensors"};
  app.set_version_flag("--version", std::string("resbound ") + version());
  std::string config_path;
  std::vector<std::string> overrides;
  bool force = false;
  bool print_config = false;
  app.add_option("-c,--config", config_path, "JSON configuration file");
  app.add_option("--set", overrides, "Override a configuration value: key.path=value")
      ->take_all()
      ->allow_extra_args(false);
  app.add_flag("-f,--force", force, "Overwrite existing output files");
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");

  const std::vector<std::pair<std::string, std::string>> help = {
      {"bounds", "QCRBs, D_r, QEF and squeezing over T and s grids"},
      {"sensitivity-curve", "Sensitivity per photon versus generalized wavelength"},
      {"max-vs-s", "Maximum sensitivity per photon versus squeezing"},
      {"fom-map", "Phase/transmission figure of merit over (T_res, T_off)"},
      {"eqef-sweep", "Effective quantum enhancement versus probe and reference loss"},
      {"kk-phase", "Minimum-phase reconstruction: FFT versus kernel integral"},
      {"verify", "Gaussian-state oracle and homodyne saturation checks"}};
  for (const auto& [name, text] : help) app.add_subcommand(name, text)->fallthrough();
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    cfg = load_config(config_path.empty() ? std::string() : read_file(config_path), overrides);
  } catch (const std::exception& e) {
    std::cerr << "resbound: configuration error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (print_config) {
    std::cout << cfg.resolved.dump(2) << "\n";
    return 0;
  }

  try {
    return execute(command, cfg, force, std::cout) == 0 ? 0 : kExitVerification;
  } catch (const ConfigError& e) {
    std::cerr << "resbound: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "resbound: " << command << " failed: " << e.what() << "\n";
    return kExitRuntime;
  }
}
