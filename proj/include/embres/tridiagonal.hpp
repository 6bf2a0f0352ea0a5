#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace embres {

// Tridiagonal matrix stored by bands. lower(k) is the (k+1, k) entry, upper(k) the (k, k+1) entry.
template <typename Scalar_>
struct Tridiagonal {
  using Scalar = Scalar_;
  using RealScalar = typename Eigen::NumTraits<Scalar>::Real;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector lower;
  Vector diag;
  Vector upper;

  Tridiagonal() = default;

  explicit Tridiagonal(Eigen::Index n)
      : lower(Vector::Zero(std::max<Eigen::Index>(n - 1, 0))),
        diag(Vector::Zero(n)),
        upper(Vector::Zero(std::max<Eigen::Index>(n - 1, 0))) {}

  Tridiagonal(Vector lo, Vector d, Vector up) : lower(std::move(lo)), diag(std::move(d)), upper(std::move(up)) {
    const Eigen::Index off = std::max<Eigen::Index>(diag.size() - 1, 0);
    if (lower.size() != off || upper.size() != off)
      throw std::invalid_argument("Tridiagonal: band sizes do not match the diagonal");
  }

  Eigen::Index size() const { return diag.size(); }

  // y = T x, column by column.
  template <typename Derived>
  Matrix apply(const Eigen::MatrixBase<Derived>& x) const {
    const Eigen::Index n = size();
    if (x.rows() != n) throw std::invalid_argument("Tridiagonal::apply: dimension mismatch");
    Matrix y = diag.asDiagonal() * x;
    if (n > 1) {
      y.bottomRows(n - 1).noalias() += lower.asDiagonal() * x.topRows(n - 1);
      y.topRows(n - 1).noalias() += upper.asDiagonal() * x.bottomRows(n - 1);
    }
    return y;
  }

  Matrix dense() const {
    const Eigen::Index n = size();
    Matrix m = Matrix::Zero(n, n);
    m.diagonal() = diag;
    if (n > 1) {
      m.template diagonal<-1>() = lower;
      m.template diagonal<1>() = upper;
    }
    return m;
  }

  Tridiagonal adjoint() const { return Tridiagonal(upper.conjugate(), diag.conjugate(), lower.conjugate()); }

  // T - sigma I
  Tridiagonal shifted(Scalar sigma) const {
    Tridiagonal out = *this;
    out.diag.array() -= sigma;
    return out;
  }

  RealScalar norm_inf() const {
    RealScalar best = 0;
    for (Eigen::Index k = 0; k < size(); ++k) {
      RealScalar row = std::abs(diag(k));
      if (k > 0) row += std::abs(lower(k - 1));
      if (k + 1 < size()) row += std::abs(upper(k));
      best = std::max(best, row);
    }
    return best;
  }
};

template <typename Scalar, typename Derived>
typename Tridiagonal<Scalar>::Matrix operator*(const Tridiagonal<Scalar>& t, const Eigen::MatrixBase<Derived>& x) {
  return t.apply(x);
}

// LU factorization with partial pivoting (row interchanges between neighbours), giving
// U with two superdiagonals. Same elimination order as LAPACK ?gttrf / ?gttrs.
template <typename Scalar_>
class TridiagonalLU {
 public:
  using Scalar = Scalar_;
  using RealScalar = typename Eigen::NumTraits<Scalar>::Real;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  TridiagonalLU() = default;
  explicit TridiagonalLU(const Tridiagonal<Scalar>& t) { compute(t); }

  TridiagonalLU& compute(const Tridiagonal<Scalar>& t) {
    const Eigen::Index n = t.size();
    dl_ = t.lower;
    d_ = t.diag;
    du_ = t.upper;
    du2_ = Vector::Zero(std::max<Eigen::Index>(n - 2, 0));
    swapped_.assign(static_cast<std::size_t>(std::max<Eigen::Index>(n - 1, 0)), false);

    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (std::abs(d_(i)) >= std::abs(dl_(i))) {
        if (d_(i) != Scalar(0)) {
          const Scalar fact = dl_(i) / d_(i);
          dl_(i) = fact;
          d_(i + 1) -= fact * du_(i);
        }
      } else {
        const Scalar fact = d_(i) / dl_(i);
        d_(i) = dl_(i);
        dl_(i) = fact;
        const Scalar temp = du_(i);
        du_(i) = d_(i + 1);
        d_(i + 1) = temp - fact * d_(i + 1);
        if (i + 2 < n) {
          du2_(i) = du_(i + 1);
          du_(i + 1) = -fact * du_(i + 1);
        }
        swapped_[static_cast<std::size_t>(i)] = true;
      }
    }
    return *this;
  }

  Eigen::Index size() const { return d_.size(); }

  bool is_singular() const { return size() > 0 && min_pivot() == RealScalar(0); }

  RealScalar min_pivot() const { return size() == 0 ? RealScalar(0) : d_.cwiseAbs().minCoeff(); }
  RealScalar max_pivot() const { return size() == 0 ? RealScalar(0) : d_.cwiseAbs().maxCoeff(); }

  template <typename Derived>
  Matrix solve(const Eigen::MatrixBase<Derived>& rhs) const {
    const Eigen::Index n = size();
    if (rhs.rows() != n) throw std::invalid_argument("TridiagonalLU::solve: dimension mismatch");
    if (is_singular()) throw std::domain_error("TridiagonalLU::solve: matrix is singular");
    Matrix b = rhs;
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (!swapped_[static_cast<std::size_t>(i)]) {
          b(i + 1, j) -= dl_(i) * b(i, j);
        } else {
          const Scalar temp = b(i, j);
          b(i, j) = b(i + 1, j);
          b(i + 1, j) = temp - dl_(i) * b(i, j);
        }
      }
      b(n - 1, j) /= d_(n - 1);
      if (n > 1) b(n - 2, j) = (b(n - 2, j) - du_(n - 2) * b(n - 1, j)) / d_(n - 2);
      for (Eigen::Index i = n - 3; i >= 0; --i)
        b(i, j) = (b(i, j) - du_(i) * b(i + 1, j) - du2_(i) * b(i + 2, j)) / d_(i);
    }
    return b;
  }

 private:
  Vector dl_, d_, du_, du2_;
  std::vector<bool> swapped_;
};

}  // namespace embres
