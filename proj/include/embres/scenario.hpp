#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "embres/fourier.hpp"
#include "embres/model.hpp"

namespace embres {

// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Flat key=value configuration. Lists are comma-separated, '#' starts a comment.
// Unset optional fields take per-scenario defaults (see run_scenario).
struct ScenarioConfig {
  std::optional<std::string> catalog;   // simple | multi | vis | custom
  int n2 = 0;
  std::optional<int> N;
  std::vector<double> eps_schedule;     // empty: default schedule
  std::vector<double> s_grid;
  std::vector<double> t_grid;
  double t_reg = 1e-6;
  std::optional<double> lambda;         // eigenvalue to start from
  std::filesystem::path output_dir = "embres_out";
  std::optional<std::filesystem::path> vm_file, va_file, w_file;  // catalog = custom
};

ScenarioConfig parse_config(std::string_view text);
ScenarioConfig read_config(const std::filesystem::path& path);

// Potential named by the config (custom tables are resolved relative to base_dir).
PotentialSpec config_potential(const ScenarioConfig& cfg, std::string_view fallback_catalog,
                               const std::filesystem::path& base_dir = {});

struct SummaryRow {
  std::string quantity;
  cplx value;
  std::string anchor;  // reference the number is compared with
};

struct ScenarioResult {
  std::vector<std::filesystem::path> files;
  std::vector<SummaryRow> summary;
};

inline constexpr std::string_view scenario_names[] = {"fgr", "multi", "viscosity", "track"};

// Runs fgr | multi | viscosity | track, writing CSV files plus summary.csv and summary.txt into
// cfg.output_dir, which must be absent or empty. Throws ConfigError for invalid input and
// NumericalError when a solver fails.
ScenarioResult run_scenario(std::string_view name, const ScenarioConfig& cfg,
                            const std::filesystem::path& base_dir = {});

// "%.16e": 17 significant digits, locale independent.
std::string format_real(double x);

}  // namespace embres
