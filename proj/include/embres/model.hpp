#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "embres/fourier.hpp"
#include "embres/tridiagonal.hpp"

namespace embres {

enum class Multiplier { vm, va, w };

// The multiplier pair (V_m, V_a) of the model operator
//
//   P = <D>^{-1} D_{x2} + sin(x1)(I - V_m(D_{x1})) + (I - V_m(D_{x1})) sin(x1) + V_a(D_{x1})
//
// together with an optional perturbation direction W, entering as V_m(s, xi) = V_m(xi) + s W(xi).
// All three are evaluated on integer frequencies only.
class PotentialSpec {
 public:
  using Table = std::map<int, double>;
  using Function = std::function<double(int)>;

  // Closed forms "simple", "multi", "vis". Throws std::invalid_argument on an unknown id.
  static PotentialSpec catalog(std::string_view id);
  // Tabulated multipliers, zero outside the table.
  static PotentialSpec tabulated(Table vm, Table va, std::optional<Table> w = std::nullopt);
  static PotentialSpec from_functions(Function vm, Function va, std::optional<Function> w = std::nullopt);

  // Copy with the perturbation direction replaced (or removed).
  PotentialSpec with_direction(Function w) const;
  PotentialSpec with_direction(const Table& w) const;
  PotentialSpec without_direction() const;

  double vm(int xi) const { return vm_(xi); }
  double va(int xi) const { return va_(xi); }
  // Throws std::invalid_argument if no direction is defined.
  double w(int xi) const;
  // V_m(s, xi); s != 0 requires a direction.
  double vm(double s, int xi) const;

  bool has_direction() const { return static_cast<bool>(w_); }
  const std::optional<std::string>& catalog_id() const { return id_; }
  // Largest |xi| present in any table; 0 for closed forms.
  int table_half_width() const { return table_half_width_; }

 private:
  Function vm_, va_;
  std::optional<Function> w_;
  std::optional<std::string> id_;
  int table_half_width_ = 0;
};

double eval_potential(const PotentialSpec& spec, Multiplier which, int xi);

// Reads "integer value" lines; '#' starts a comment. Throws std::invalid_argument on malformed input.
PotentialSpec::Table read_potential_table(const std::filesystem::path& path);
PotentialSpec load_potential(const std::filesystem::path& vm_path, const std::filesystem::path& va_path,
                             const std::optional<std::filesystem::path>& w_path = std::nullopt);

// P(s) + i t Delta restricted to the fiber n2 and truncated to |n1| <= N.
//
// Row/column k holds mode n1 = k - N. bands.lower(k) couples mode n1 into n1 + 1 and
// bands.upper(k) couples mode n1 + 1 into n1, both indexed by the lower mode:
//
//   diag(n1)          = n2 / <n> + V_a(n1) - i t (n1^2 + n2^2)
//   lower(n1 -> n1+1) =  (2 - V_m(s, n1) - V_m(s, n1+1)) / (2i)
//   upper(n1+1 -> n1) = -(2 - V_m(s, n1) - V_m(s, n1+1)) / (2i)
struct FiberOperator {
  PotentialSpec spec;
  int n2 = 0;
  int N = 0;
  double s = 0.0;
  double t = 0.0;
  Tridiagonal<cplx> bands;

  Eigen::Index size() const { return 2 * N + 1; }
  Eigen::Index index(int n1) const { return n1 + N; }
  int mode(Eigen::Index k) const { return static_cast<int>(k) - N; }

  // Matrix elements for arbitrary n1, including modes outside the truncation.
  cplx diagonal_at(int n1) const;
  cplx lower_at(int n1) const;  // n1 -> n1 + 1
  cplx upper_at(int n1) const;  // n1 + 1 -> n1

  // The same entries with the free (V_m = V_a = 0, n2 = 0, t = 0) part removed.
  cplx diagonal_defect_at(int n1) const;
  cplx lower_defect_at(int n1) const;
  cplx upper_defect_at(int n1) const;

  Eigen::MatrixXcd dense() const { return bands.dense(); }

  // Coefficient vector of v on [-N, N]; throws if v lives elsewhere.
  Eigen::VectorXcd embed(const FourierVector& v) const;
  FourierVector wrap(const Eigen::VectorXcd& c) const;

  // P v, truncated to the window.
  FourierVector apply(const FourierVector& v) const;
};

FiberOperator assemble_fiber(const PotentialSpec& spec, int n2, int N, double s = 0.0, double t = 0.0);

// dP/ds applied to v (exact, the dependence on s is linear). Output support grows by one mode each side.
FourierVector apply_pdot(const PotentialSpec& spec, const FourierVector& v);

}  // namespace embres
