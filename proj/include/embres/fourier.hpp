#pragma once

#include <complex>
#include <numbers>
#include <optional>
#include <utility>

#include <Eigen/Core>

namespace embres {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Finitely supported coefficient sequence c_{n1} of  sum_n1 c_{n1} e^{i(n1 x1 + n2 x2)}
// on a single x2-fiber. Coefficients are stored on the window [first, first + size).
class FourierVector {
 public:
  FourierVector() = default;
  FourierVector(int n2, int first, Eigen::VectorXcd coeffs);

  // Zero vector on the symmetric window [-half_width, half_width].
  static FourierVector zeros(int n2, int half_width);
  // c * e^{i n1 x1}
  static FourierVector mode(int n2, int n1, cplx c = 1.0);

  int n2() const { return n2_; }
  int first() const { return first_; }
  int last() const { return first_ + static_cast<int>(coeffs_.size()) - 1; }
  bool empty() const { return coeffs_.size() == 0; }

  cplx operator[](int n1) const;
  // Mutable access; n1 must lie in the stored window.
  cplx& at(int n1);

  const Eigen::VectorXcd& coeffs() const { return coeffs_; }
  Eigen::VectorXcd& coeffs() { return coeffs_; }

  // Smallest window holding every coefficient with |c| > tol, or nullopt for the zero vector.
  std::optional<std::pair<int, int>> support(double tol = 0.0) const;

  // Same function re-stored on [-half_width, half_width]; throws std::invalid_argument
  // if a coefficient with |c| > tol would fall outside. Smaller ones are dropped.
  FourierVector on_window(int half_width, double tol = 0.0) const;

  FourierVector& operator+=(const FourierVector& other);
  FourierVector& operator-=(const FourierVector& other);
  FourierVector& operator*=(cplx a);

 private:
  int n2_ = 0;
  int first_ = 0;
  Eigen::VectorXcd coeffs_;
};

FourierVector operator+(FourierVector a, const FourierVector& b);
FourierVector operator-(FourierVector a, const FourierVector& b);
FourierVector operator*(cplx a, FourierVector v);

// L^2(T^2) pairing <u, v> = (2 pi)^2 sum_n u_n conj(v_n); linear in u.
cplx inner(const FourierVector& u, const FourierVector& v);
double norm(const FourierVector& u);
FourierVector normalized(const FourierVector& u);

}  // namespace embres
