#include <cmath>
#include <stdexcept>
#include <string>

#include "embres/model.hpp"

namespace embres {

namespace {

constexpr cplx half_over_i{0.0, -0.5};  // 1 / (2i)

double bracket(int n1, int n2) { return std::sqrt(1.0 + double(n1) * n1 + double(n2) * n2); }

}  // namespace

cplx FiberOperator::diagonal_at(int n1) const {
  return cplx(n2 / bracket(n1, n2) + spec.va(n1), -t * (double(n1) * n1 + double(n2) * n2));
}

cplx FiberOperator::lower_at(int n1) const { return (2.0 - spec.vm(s, n1) - spec.vm(s, n1 + 1)) * half_over_i; }

cplx FiberOperator::upper_at(int n1) const { return -lower_at(n1); }

cplx FiberOperator::diagonal_defect_at(int n1) const { return diagonal_at(n1); }

cplx FiberOperator::lower_defect_at(int n1) const { return -(spec.vm(s, n1) + spec.vm(s, n1 + 1)) * half_over_i; }

cplx FiberOperator::upper_defect_at(int n1) const { return -lower_defect_at(n1); }

Eigen::VectorXcd FiberOperator::embed(const FourierVector& v) const {
  if (!v.empty() && v.n2() != n2)
    throw std::invalid_argument("vector lives on fiber " + std::to_string(v.n2()) + ", operator on fiber " +
                                std::to_string(n2));
  if (v.empty()) return Eigen::VectorXcd::Zero(size());
  return v.on_window(N).coeffs();
}

FourierVector FiberOperator::wrap(const Eigen::VectorXcd& c) const {
  if (c.size() != size()) throw std::invalid_argument("FiberOperator::wrap: dimension mismatch");
  return FourierVector(n2, -N, c);
}

FourierVector FiberOperator::apply(const FourierVector& v) const { return wrap(bands.apply(embed(v))); }

FiberOperator assemble_fiber(const PotentialSpec& spec, int n2, int N, double s, double t) {
  if (N < 1) throw std::invalid_argument("assemble_fiber: truncation half-width must be >= 1");
  if (t < 0.0) throw std::invalid_argument("assemble_fiber: viscosity must be non-negative");
  if (s != 0.0 && !spec.has_direction())
    throw std::invalid_argument("assemble_fiber: s != 0 needs a perturbation direction");

  FiberOperator op{spec, n2, N, s, t, Tridiagonal<cplx>(2 * N + 1)};
  for (int n1 = -N; n1 <= N; ++n1) op.bands.diag(op.index(n1)) = op.diagonal_at(n1);
  for (int n1 = -N; n1 < N; ++n1) {
    op.bands.lower(op.index(n1)) = op.lower_at(n1);
    op.bands.upper(op.index(n1)) = op.upper_at(n1);
  }
  return op;
}

FourierVector apply_pdot(const PotentialSpec& spec, const FourierVector& v) {
  if (!spec.has_direction()) throw std::invalid_argument("apply_pdot: potential has no perturbation direction");
  if (v.empty()) return v;
  FourierVector out(v.n2(), v.first() - 1, Eigen::VectorXcd::Zero(v.coeffs().size() + 2));
  for (int n = v.first(); n <= v.last(); ++n) {
    const cplx c = v[n];
    if (c == 0.0) continue;
    out.at(n - 1) += (spec.w(n) + spec.w(n - 1)) * half_over_i * c;
    out.at(n + 1) -= (spec.w(n) + spec.w(n + 1)) * half_over_i * c;
  }
  return out;
}

}  // namespace embres
