#include "embres/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "embres/errors.hpp"

namespace embres {

namespace {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

Matrix orthonormal_basis(const Matrix& x) {
  Eigen::HouseholderQR<Matrix> qr(x);
  return qr.householderQ() * Matrix::Identity(x.rows(), x.cols());
}

Matrix random_block(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix x(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) x(i, j) = cplx(normal(rng), normal(rng));
  return x;
}

double residual_of(const Tridiagonal<cplx>& m, cplx value, const Vector& v) {
  return (m.apply(v) - value * v).norm() / v.norm();
}

// Reduced row echelon basis of span(columns of b), scanning modes in increasing order.
Matrix echelon_basis(const Matrix& b) {
  Matrix r = b.transpose();
  const double scale = r.cwiseAbs().maxCoeff();
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < r.cols() && row < r.rows(); ++col) {
    Eigen::Index piv = row;
    r.col(col).segment(row, r.rows() - row).cwiseAbs().maxCoeff(&piv);
    piv += row;
    if (std::abs(r(piv, col)) <= 1e-8 * scale) continue;
    r.row(row).swap(r.row(piv));
    r.row(row) /= r(row, col);
    for (Eigen::Index i = 0; i < r.rows(); ++i)
      if (i != row) r.row(i) -= r(i, col) * r.row(row);
    ++row;
  }
  return r.transpose();
}

// Modified Gram-Schmidt in column order.
void orthonormalize_in_order(Matrix& b) {
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) b.col(j) -= b.col(i).dot(b.col(j)) * b.col(i);
    b.col(j).normalize();
  }
}

std::vector<RitzPair> dense_eigs_near(const Tridiagonal<cplx>& m, cplx shift, int k) {
  Eigen::ComplexEigenSolver<Matrix> es(m.dense(), true);
  if (es.info() != Eigen::Success) throw NumericalError("eigs_near: dense QR did not converge");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return std::abs(es.eigenvalues()(a) - shift) < std::abs(es.eigenvalues()(b) - shift);
  });
  std::vector<RitzPair> out;
  for (int j = 0; j < k; ++j) {
    const auto idx = order[static_cast<std::size_t>(j)];
    Vector v = es.eigenvectors().col(idx).normalized();
    out.push_back({es.eigenvalues()(idx), v, residual_of(m, es.eigenvalues()(idx), v)});
  }
  return out;
}

void canonicalize_clusters(const Tridiagonal<cplx>& m, std::vector<RitzPair>& pairs, double cluster_tol) {
  const std::size_t k = pairs.size();
  std::vector<std::size_t> label(k);
  std::iota(label.begin(), label.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    return label[i] == i ? i : label[i] = find(label[i]);
  };
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (std::abs(pairs[i].value - pairs[j].value) < cluster_tol) label[find(j)] = find(i);

  std::vector<RitzPair> out;
  std::vector<bool> done(k, false);
  for (std::size_t i = 0; i < k; ++i) {
    if (done[i]) continue;
    std::vector<std::size_t> members;
    for (std::size_t j = i; j < k; ++j)
      if (find(j) == find(i)) members.push_back(j);
    for (auto j : members) done[j] = true;
    if (members.size() == 1) {
      out.push_back(pairs[i]);
      continue;
    }
    Matrix block(m.size(), static_cast<Eigen::Index>(members.size()));
    for (std::size_t c = 0; c < members.size(); ++c) block.col(static_cast<Eigen::Index>(c)) = pairs[members[c]].vector;
    Matrix basis = echelon_basis(orthonormal_basis(block));
    orthonormalize_in_order(basis);
    for (Eigen::Index c = 0; c < basis.cols(); ++c) {
      Vector v = basis.col(c);
      const cplx value = v.dot(m.apply(v).col(0));
      out.push_back({value, v, residual_of(m, value, v)});
    }
  }
  pairs = std::move(out);
}

// Rayleigh-quotient inverse iteration on one isolated pair; keeps the best residual seen.
void refine(const Tridiagonal<cplx>& m, RitzPair& p, double target) {
  for (int step = 0; step < 3 && p.residual > target; ++step) {
    TridiagonalLU<cplx> lu(m.shifted(p.value));
    if (lu.is_singular()) return;
    Vector v = lu.solve(p.vector);
    if (!v.allFinite() || v.norm() == 0.0) return;
    v.normalize();
    const cplx value = v.dot(m.apply(v).col(0));
    const double res = residual_of(m, value, v);
    if (!(res < p.residual)) return;
    p = {value, std::move(v), res};
  }
}

}  // namespace

void fix_phase(Eigen::VectorXcd& v, double rel_tol) {
  if (v.size() == 0) return;
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > rel_tol * scale) {
      v *= std::conj(v(k)) / std::abs(v(k));
      v(k) = std::abs(v(k));
      return;
    }
  }
}

std::vector<RitzPair> eigs_near(const Tridiagonal<cplx>& m, cplx shift, int k, const EigsOptions& opts) {
  const Eigen::Index n = m.size();
  if (k < 1 || k > n) throw std::invalid_argument("eigs_near: need 1 <= k <= matrix size");

  const Eigen::Index block = std::min<Eigen::Index>(n, k + 6);
  std::vector<RitzPair> pairs;
  if (block == n || n <= 8) {
    pairs = dense_eigs_near(m, shift, k);
  } else {
    TridiagonalLU<cplx> lu(m.shifted(shift));
    if (lu.is_singular()) {
      shift += 1e-12;
      lu.compute(m.shifted(shift));
    }
    if (lu.is_singular()) throw NumericalError("eigs_near: shifted matrix is singular");

    std::mt19937_64 rng(opts.seed);
    Matrix x = random_block(n, block, rng);
    for (std::size_t j = 0; j < opts.start.size() && static_cast<Eigen::Index>(j) < block; ++j) {
      if (opts.start[j].size() != n) throw std::invalid_argument("eigs_near: warm start has wrong length");
      x.col(static_cast<Eigen::Index>(j)) = opts.start[j];
    }
    Matrix q = orthonormal_basis(x);

    const double scale = std::max(1.0, m.norm_inf());
    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
      q = orthonormal_basis(lu.solve(q));
      const Matrix mq = m.apply(q);
      Eigen::ComplexEigenSolver<Matrix> ritz(q.adjoint() * mq, true);
      if (ritz.info() != Eigen::Success) throw NumericalError("eigs_near: Rayleigh-Ritz step failed");

      std::vector<Eigen::Index> order(static_cast<std::size_t>(block));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        return std::abs(ritz.eigenvalues()(a) - shift) < std::abs(ritz.eigenvalues()(b) - shift);
      });
      pairs.clear();
      double worst = 0.0;
      for (int j = 0; j < k; ++j) {
        const auto idx = order[static_cast<std::size_t>(j)];
        Vector v = (q * ritz.eigenvectors().col(idx)).normalized();
        const cplx value = ritz.eigenvalues()(idx);
        const double res = residual_of(m, value, v);
        worst = std::max(worst, res);
        pairs.push_back({value, std::move(v), res});
      }
      if (worst <= opts.tol * scale) break;
      if (worst < 0.5 * best) {
        best = worst;
        since_best = 0;
      } else if (++since_best >= 25) {
        // Stagnation: keep the wanted Ritz vectors, refresh the guard columns.
        Matrix fresh = random_block(n, block, rng);
        for (int j = 0; j < k; ++j) fresh.col(j) = pairs[static_cast<std::size_t>(j)].vector;
        q = orthonormal_basis(fresh);
        since_best = 0;
      }
      if (iter + 1 == opts.max_iter && worst > opts.residual_bound * scale) {
        // Slow separation of the wanted eigenvalues from the rest; small problems go dense.
        if (n > opts.dense_fallback)
          throw NumericalError("eigs_near: inverse iteration did not converge (residual " + std::to_string(worst) + ")",
                               worst);
        pairs = dense_eigs_near(m, shift, k);
      }
    }
  }

  // Stalled block iterations leave isolated pairs short of the target.
  const double target = opts.tol * std::max(1.0, m.norm_inf());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    bool isolated = true;
    for (std::size_t j = 0; j < pairs.size(); ++j)
      isolated &= i == j || std::abs(pairs[i].value - pairs[j].value) > opts.cluster_tol;
    if (isolated) refine(m, pairs[i], target);
  }

  // Pairs arrive sorted by distance to the shift; clusters keep the position of their nearest member.
  canonicalize_clusters(m, pairs, opts.cluster_tol);
  for (auto& p : pairs) fix_phase(p.vector);
  return pairs;
}

std::vector<Eigenpair> eigs_near(const FiberOperator& op, cplx shift, int k, const EigsOptions& opts) {
  std::vector<Eigenpair> out;
  for (auto& p : eigs_near(op.bands, shift, k, opts)) {
    FourierVector v = normalized(op.wrap(p.vector));
    out.push_back({p.value, std::move(v), p.residual});
  }
  return out;
}

std::vector<cplx> full_spectrum(const Eigen::MatrixXcd& m) {
  Eigen::ComplexEigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success) throw NumericalError("full_spectrum: QR iteration did not converge");
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

std::vector<cplx> full_spectrum(const FiberOperator& op, Eigen::Index dense_limit) {
  if (op.size() > dense_limit)
    throw std::invalid_argument("full_spectrum: truncation of size " + std::to_string(op.size()) +
                                " exceeds the dense limit " + std::to_string(dense_limit));
  return full_spectrum(op.dense());
}

double grad_norm_sq(const FourierVector& u) {
  double sum = 0.0;
  for (int n1 = u.first(); n1 <= u.last(); ++n1)
    sum += (double(n1) * n1 + double(u.n2()) * u.n2()) * std::norm(u[n1]);
  return two_pi * two_pi * sum;
}

}  // namespace embres
