#include "embres/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace embres {

FourierVector::FourierVector(int n2, int first, Eigen::VectorXcd coeffs)
    : n2_(n2), first_(first), coeffs_(std::move(coeffs)) {}

FourierVector FourierVector::zeros(int n2, int half_width) {
  if (half_width < 0) throw std::invalid_argument("FourierVector: negative window half-width");
  return FourierVector(n2, -half_width, Eigen::VectorXcd::Zero(2 * half_width + 1));
}

FourierVector FourierVector::mode(int n2, int n1, cplx c) {
  Eigen::VectorXcd v(1);
  v(0) = c;
  return FourierVector(n2, n1, std::move(v));
}

cplx FourierVector::operator[](int n1) const {
  const int k = n1 - first_;
  if (k < 0 || k >= coeffs_.size()) return 0.0;
  return coeffs_(k);
}

cplx& FourierVector::at(int n1) {
  const int k = n1 - first_;
  if (k < 0 || k >= coeffs_.size())
    throw std::out_of_range("FourierVector::at: mode " + std::to_string(n1) + " outside stored window");
  return coeffs_(k);
}

std::optional<std::pair<int, int>> FourierVector::support(double tol) const {
  int lo = 0, hi = -1;
  for (Eigen::Index k = 0; k < coeffs_.size(); ++k) {
    if (std::abs(coeffs_(k)) > tol) {
      if (hi < lo) lo = first_ + static_cast<int>(k);
      hi = first_ + static_cast<int>(k);
    }
  }
  if (hi < lo) return std::nullopt;
  return std::make_pair(lo, hi);
}

FourierVector FourierVector::on_window(int half_width, double tol) const {
  if (auto sup = support(tol); sup && (sup->first < -half_width || sup->second > half_width)) {
    throw std::invalid_argument("FourierVector: support [" + std::to_string(sup->first) + ", " +
                                std::to_string(sup->second) + "] does not fit in window of half-width " +
                                std::to_string(half_width));
  }
  FourierVector out = zeros(n2_, half_width);
  for (int n = std::max(first_, -half_width); n <= std::min(last(), half_width); ++n) out.at(n) = (*this)[n];
  return out;
}

namespace {

FourierVector combine(const FourierVector& a, const FourierVector& b, double sign) {
  if (a.empty()) return sign > 0 ? b : -1.0 * b;
  if (b.empty()) return a;
  if (a.n2() != b.n2()) throw std::invalid_argument("FourierVector: fiber mismatch");
  const int lo = std::min(a.first(), b.first());
  const int hi = std::max(a.last(), b.last());
  Eigen::VectorXcd c(hi - lo + 1);
  for (int n = lo; n <= hi; ++n) c(n - lo) = a[n] + sign * b[n];
  return FourierVector(a.n2(), lo, std::move(c));
}

}  // namespace

FourierVector& FourierVector::operator+=(const FourierVector& other) {
  return *this = combine(*this, other, 1.0);
}

FourierVector& FourierVector::operator-=(const FourierVector& other) {
  return *this = combine(*this, other, -1.0);
}

FourierVector& FourierVector::operator*=(cplx a) {
  coeffs_ *= a;
  return *this;
}

FourierVector operator+(FourierVector a, const FourierVector& b) { return a += b; }
FourierVector operator-(FourierVector a, const FourierVector& b) { return a -= b; }
FourierVector operator*(cplx a, FourierVector v) { return v *= a; }

cplx inner(const FourierVector& u, const FourierVector& v) {
  if (u.empty() || v.empty()) return 0.0;
  if (u.n2() != v.n2()) return 0.0;  // distinct fibers are orthogonal
  cplx sum = 0.0;
  for (int n = std::max(u.first(), v.first()); n <= std::min(u.last(), v.last()); ++n)
    sum += u[n] * std::conj(v[n]);
  return two_pi * two_pi * sum;
}

double norm(const FourierVector& u) { return two_pi * u.coeffs().norm(); }

FourierVector normalized(const FourierVector& u) {
  const double nrm = norm(u);
  if (nrm == 0.0) throw std::invalid_argument("normalized: zero vector");
  return (1.0 / nrm) * u;
}

}  // namespace embres
