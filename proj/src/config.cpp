#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "embres/scenario.hpp"

namespace embres {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError(key + ": empty value");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
    throw ConfigError(key + ": '" + t + "' is not a finite real number");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || v < -1000000 || v > 1000000)
    throw ConfigError(key + ": '" + t + "' is not an integer");
  return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!(out[i] > out[i - 1])) throw ConfigError(key + ": values must be strictly increasing");
  return out;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");

    if (key == "catalog") {
      static const std::set<std::string> known = {"simple", "multi", "vis", "custom"};
      if (!known.count(value)) throw ConfigError("catalog: unknown id '" + value + "'");
      cfg.catalog = value;
    } else if (key == "n2") {
      cfg.n2 = parse_int(key, value);
    } else if (key == "N") {
      cfg.N = parse_int(key, value);
      if (*cfg.N < 1) throw ConfigError("N: must be >= 1");
    } else if (key == "eps_schedule") {
      auto eps = parse_list(key, value);
      if (eps.size() < 2) throw ConfigError("eps_schedule: need at least two values");
      if (eps.front() <= 0.0) throw ConfigError("eps_schedule: values must be positive");
      // Listed in any monotone order; stored decreasing like the default schedule.
      std::reverse(eps.begin(), eps.end());
      cfg.eps_schedule = std::move(eps);
    } else if (key == "s_grid") {
      cfg.s_grid = parse_list(key, value);
    } else if (key == "t_grid") {
      cfg.t_grid = parse_list(key, value);
      if (cfg.t_grid.front() < 0.0) throw ConfigError("t_grid: values must be non-negative");
    } else if (key == "t_reg") {
      cfg.t_reg = parse_real(key, value);
      if (cfg.t_reg <= 0.0) throw ConfigError("t_reg: must be positive");
    } else if (key == "lambda") {
      cfg.lambda = parse_real(key, value);
    } else if (key == "output_dir") {
      if (value.empty()) throw ConfigError("output_dir: empty path");
      cfg.output_dir = value;
    } else if (key == "vm_file") {
      cfg.vm_file = value;
    } else if (key == "va_file") {
      cfg.va_file = value;
    } else if (key == "w_file") {
      cfg.w_file = value;
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  const bool has_files = cfg.vm_file || cfg.va_file || cfg.w_file;
  if (cfg.catalog == "custom" && !(cfg.vm_file && cfg.va_file))
    throw ConfigError("catalog=custom needs vm_file and va_file");
  if (has_files && cfg.catalog != "custom") throw ConfigError("potential files require catalog=custom");
  return cfg;
}

ScenarioConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

PotentialSpec config_potential(const ScenarioConfig& cfg, std::string_view fallback_catalog,
                               const std::filesystem::path& base_dir) {
  const std::string id = cfg.catalog.value_or(std::string(fallback_catalog));
  if (id != "custom") return PotentialSpec::catalog(id);
  auto resolve = [&](const std::filesystem::path& p) { return p.is_absolute() ? p : base_dir / p; };
  try {
    std::optional<std::filesystem::path> w;
    if (cfg.w_file) w = resolve(*cfg.w_file);
    return load_potential(resolve(*cfg.vm_file), resolve(*cfg.va_file), w);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", x + 0.0);  // no negative zero
  return buf;
}

}  // namespace embres
