#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "embres/model.hpp"

namespace embres {

namespace {

// sin^2(pi xi / 2) on the integers, exactly.
double sin_sq_half_pi(int xi) { return (xi % 2 != 0) ? 1.0 : 0.0; }

double sq(double x) { return x * x; }

namespace simple {
double vm(int xi) { return 2.0 * sin_sq_half_pi(xi) * std::exp(-sq(xi - 1.0)); }
double va(int xi) { return 5.0 * (xi - 1.0) * std::exp(-sq(static_cast<double>(xi))); }
double w(int xi) { return std::exp(-sq(xi - 1.0)); }
}  // namespace simple

namespace multi {
double vm(int xi) { return 2.0 * sin_sq_half_pi(xi) * std::exp(-sq(sq(static_cast<double>(xi)) - 1.0)); }
double va(int xi) { return 6.0 * (1.0 - sq(static_cast<double>(xi))) * std::exp(-sq(xi - 1.0)); }
double w(int xi) { return std::exp(-sq(xi + 0.8)) + 0.8 * std::exp(-sq(xi - 0.8)); }
}  // namespace multi

// Both exponents are non-positive on the integers; the polynomial prefactors are kept over a
// common denominator so the values at the eigenfunction support are exact.
namespace vis {
double vm(int xi) {
  const double x = xi;
  const double poly = (x + 3.0) * (x - 2.0) * (6.0 * x * x * x + 7.0 * x * x - 11.0 * x - 8.0);
  const double expo = x * (x + 3.0) * (x * x - 1.0) * (x * x - 4.0);
  return poly / 12.0 * std::exp(-expo);
}
double va(int xi) {
  const double x = xi;
  const double poly = -2.0 * x * x * x - 3.0 * x * x + 5.0 * x + 9.0;
  const double expo = x * (x * x - 1.0) * (x + 2.0);
  return poly / 3.0 * std::exp(-expo);
}
}  // namespace vis

PotentialSpec::Function table_function(PotentialSpec::Table table) {
  return [table = std::move(table)](int xi) {
    auto it = table.find(xi);
    return it == table.end() ? 0.0 : it->second;
  };
}

int half_width(const PotentialSpec::Table& table) {
  int w = 0;
  for (const auto& [xi, value] : table) w = std::max(w, std::abs(xi));
  return w;
}

}  // namespace

PotentialSpec PotentialSpec::catalog(std::string_view id) {
  PotentialSpec spec;
  if (id == "simple") {
    spec.vm_ = simple::vm;
    spec.va_ = simple::va;
    spec.w_ = simple::w;
  } else if (id == "multi") {
    spec.vm_ = multi::vm;
    spec.va_ = multi::va;
    spec.w_ = multi::w;
  } else if (id == "vis") {
    spec.vm_ = vis::vm;
    spec.va_ = vis::va;
  } else {
    throw std::invalid_argument("unknown potential catalog id '" + std::string(id) + "'");
  }
  spec.id_ = std::string(id);
  return spec;
}

PotentialSpec PotentialSpec::tabulated(Table vm, Table va, std::optional<Table> w) {
  PotentialSpec spec;
  spec.table_half_width_ = std::max(half_width(vm), half_width(va));
  if (w) spec.table_half_width_ = std::max(spec.table_half_width_, half_width(*w));
  spec.vm_ = table_function(std::move(vm));
  spec.va_ = table_function(std::move(va));
  if (w) spec.w_ = table_function(std::move(*w));
  return spec;
}

PotentialSpec PotentialSpec::from_functions(Function vm, Function va, std::optional<Function> w) {
  PotentialSpec spec;
  spec.vm_ = std::move(vm);
  spec.va_ = std::move(va);
  spec.w_ = std::move(w);
  return spec;
}

PotentialSpec PotentialSpec::with_direction(Function w) const {
  PotentialSpec out = *this;
  out.w_ = std::move(w);
  return out;
}

PotentialSpec PotentialSpec::with_direction(const Table& w) const {
  PotentialSpec out = with_direction(table_function(w));
  out.table_half_width_ = std::max(out.table_half_width_, half_width(w));
  return out;
}

PotentialSpec PotentialSpec::without_direction() const {
  PotentialSpec out = *this;
  out.w_.reset();
  return out;
}

double PotentialSpec::w(int xi) const {
  if (!w_) throw std::invalid_argument("potential has no perturbation direction");
  return (*w_)(xi);
}

double PotentialSpec::vm(double s, int xi) const {
  if (s == 0.0) return vm_(xi);
  return vm_(xi) + s * w(xi);
}

double eval_potential(const PotentialSpec& spec, Multiplier which, int xi) {
  switch (which) {
    case Multiplier::vm: return spec.vm(xi);
    case Multiplier::va: return spec.va(xi);
    case Multiplier::w: return spec.w(xi);
  }
  throw std::invalid_argument("eval_potential: bad multiplier");
}

PotentialSpec::Table read_potential_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open potential table " + path.string());
  PotentialSpec::Table table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long xi = 0;
    double value = 0.0;
    if (!(fields >> xi)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": expected 'integer value'");
    }
    std::string rest;
    if (!(fields >> value) || (fields >> rest))
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": expected 'integer value'");
    if (!std::isfinite(value))
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": non-finite value");
    if (!table.emplace(static_cast<int>(xi), value).second)
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": duplicate frequency");
  }
  return table;
}

PotentialSpec load_potential(const std::filesystem::path& vm_path, const std::filesystem::path& va_path,
                             const std::optional<std::filesystem::path>& w_path) {
  std::optional<PotentialSpec::Table> w;
  if (w_path) w = read_potential_table(*w_path);
  return PotentialSpec::tabulated(read_potential_table(vm_path), read_potential_table(va_path), std::move(w));
}

}  // namespace embres
