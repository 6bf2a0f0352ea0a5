#pragma once

#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "embres/errors.hpp"

namespace embres {

// Grushin problem
//
//   [ P        R_minus ] [ E        E_plus       ]   [ I 0 ]
//   [ R_plus   0       ] [ E_minus  E_minus_plus ] = [ 0 I ]
//
// with R_minus : C^m -> C^n (m columns) and R_plus : C^n -> C^m (m rows).
// P is invertible iff E_minus_plus is, and then P^{-1} = E - E_plus E_minus_plus^{-1} E_minus.
template <typename Scalar_>
struct GrushinBlocks {
  using Scalar = Scalar_;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Matrix P, R_minus, R_plus;
  Matrix E, E_plus, E_minus, E_minus_plus;

  Eigen::Index n() const { return P.rows(); }
  Eigen::Index m() const { return R_plus.rows(); }

  Matrix assembled() const {
    Matrix a = Matrix::Zero(n() + m(), n() + m());
    a.topLeftCorner(n(), n()) = P;
    a.topRightCorner(n(), m()) = R_minus;
    a.bottomLeftCorner(m(), n()) = R_plus;
    return a;
  }

  Matrix inverse() const {
    Matrix a(n() + m(), n() + m());
    a << E, E_plus, E_minus, E_minus_plus;
    return a;
  }
};

template <typename DerivedP, typename DerivedRp, typename DerivedRm>
GrushinBlocks<typename DerivedP::Scalar> grushin_invert(const Eigen::MatrixBase<DerivedP>& P,
                                                        const Eigen::MatrixBase<DerivedRp>& R_plus,
                                                        const Eigen::MatrixBase<DerivedRm>& R_minus) {
  using Blocks = GrushinBlocks<typename DerivedP::Scalar>;
  using Matrix = typename Blocks::Matrix;
  const Eigen::Index n = P.rows(), m = R_plus.rows();
  if (P.cols() != n || R_plus.cols() != n || R_minus.rows() != n || R_minus.cols() != m)
    throw std::invalid_argument("grushin_invert: block dimensions do not match");

  Blocks b;
  b.P = P;
  b.R_plus = R_plus;
  b.R_minus = R_minus;
  Eigen::FullPivLU<Matrix> lu(b.assembled());
  if (!lu.isInvertible()) throw NumericalError("grushin_invert: block system is singular");
  const Matrix inv = lu.inverse();
  b.E = inv.topLeftCorner(n, n);
  b.E_plus = inv.topRightCorner(n, m);
  b.E_minus = inv.bottomLeftCorner(m, n);
  b.E_minus_plus = inv.bottomRightCorner(m, m);
  return b;
}

// Effective Hamiltonian of the Grushin problem for P + sB with the same R_plus, R_minus:
//
//   F_minus_plus = E_minus_plus + sum_{l=1}^{kmax} (-s)^l E_minus B (E B)^{l-1} E_plus
//
// Requires ||s E B||_2 < 1; throws std::domain_error otherwise.
template <typename Scalar, typename DerivedB>
typename GrushinBlocks<Scalar>::Matrix perturbed_schur_series(const GrushinBlocks<Scalar>& blocks,
                                                              const Eigen::MatrixBase<DerivedB>& B,
                                                              typename Eigen::NumTraits<Scalar>::Real s, int kmax) {
  using Matrix = typename GrushinBlocks<Scalar>::Matrix;
  if (B.rows() != blocks.n() || B.cols() != blocks.n())
    throw std::invalid_argument("perturbed_schur_series: B has the wrong shape");
  if (kmax < 0) throw std::invalid_argument("perturbed_schur_series: kmax must be >= 0");

  const Matrix eb = blocks.E * B;
  const auto gain = std::abs(s) * Eigen::JacobiSVD<Matrix>(eb).singularValues()(0);
  if (!(gain < 1)) throw std::domain_error("perturbed_schur_series: ||s E B|| >= 1, series need not converge");

  Matrix f = blocks.E_minus_plus;
  Matrix tail = blocks.E_plus;  // (E B)^{l-1} E_plus
  Scalar coeff(1);
  for (int l = 1; l <= kmax; ++l) {
    coeff *= -s;
    f.noalias() += coeff * (blocks.E_minus * (B * tail));
    tail = eb * tail;
  }
  return f;
}

}  // namespace embres
