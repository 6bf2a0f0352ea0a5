#include <cmath>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "embres/errors.hpp"
#include "embres/scenario.hpp"

namespace {

constexpr int exit_invalid_config = 2;
constexpr int exit_numerical_failure = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Embedded eigenvalues and resonances of 0th order model operators on the 2-torus"};
  std::string scenario;
  std::string config_path;
  std::string out_dir;
  app.add_option("scenario", scenario, "fgr | multi | viscosity | track")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(embres::scenario_names),
                                                     std::end(embres::scenario_names))));
  app.add_option("--config", config_path, "key=value configuration file")->required();
  app.add_option("--out", out_dir, "output directory (overrides output_dir; must be new or empty)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_invalid_config;
  }

  try {
    embres::ScenarioConfig cfg = embres::read_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    const auto result = embres::run_scenario(scenario, cfg, std::filesystem::path(config_path).parent_path());
    for (const auto& f : result.files) std::cout << f.string() << '\n';
    return 0;
  } catch (const embres::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return exit_invalid_config;
  } catch (const embres::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what();
    if (!std::isnan(e.diagnostic())) std::cerr << " (diagnostic " << e.diagnostic() << ")";
    std::cerr << '\n';
    return exit_numerical_failure;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical_failure;
  }
}
