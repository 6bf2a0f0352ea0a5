#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "embres/fourier.hpp"
#include "embres/model.hpp"
#include "embres/tridiagonal.hpp"

namespace embres {

// Eigenvalue with unit-L^2 eigenvector. The vector's phase is fixed so that its first
// significant coefficient (lowest n1) is real and positive.
struct Eigenpair {
  cplx lambda;
  FourierVector vector;
  double residual = 0.0;  // ||(M - lambda) v|| / ||v||
};

struct EigsOptions {
  double tol = 1e-12;             // iteration target, relative to max(1, ||M||_inf)
  double residual_bound = 1e-10;  // accepted residual when the target is not reached
  int max_iter = 200;
  double cluster_tol = 1e-8;
  std::uint64_t seed = 0x5eedULL;
  // Matrices up to this size fall back to dense QR when the iteration misses the bound.
  Eigen::Index dense_fallback = 801;
  // Warm-start vectors (coefficients on the truncation window), used before random ones.
  std::vector<Eigen::VectorXcd> start;
};

// Raw result on a bare tridiagonal matrix.
struct RitzPair {
  cplx value;
  Eigen::VectorXcd vector;  // Euclidean unit norm
  double residual = 0.0;
};

// The k eigenvalues closest to `shift`, by shifted block inverse iteration (k + 6 columns) with
// Rayleigh-Ritz extraction. Eigenvalues closer than cluster_tol are returned with a canonical orthonormal
// basis of their joint invariant subspace. Throws NumericalError (diagnostic = attained
// residual) if the residual bound is not met after max_iter sweeps.
std::vector<RitzPair> eigs_near(const Tridiagonal<cplx>& m, cplx shift, int k, const EigsOptions& opts = {});
std::vector<Eigenpair> eigs_near(const FiberOperator& op, cplx shift, int k, const EigsOptions& opts = {});

// All eigenvalues (with multiplicity, unordered) by dense Hessenberg-QR.
std::vector<cplx> full_spectrum(const Eigen::MatrixXcd& m);
std::vector<cplx> full_spectrum(const FiberOperator& op, Eigen::Index dense_limit = 2001);

// ||grad u||^2_{L^2(T^2)} = (2 pi)^2 sum (n1^2 + n2^2) |c_n1|^2
double grad_norm_sq(const FourierVector& u);

// Rotates v so that its first coefficient above rel_tol * max|v_k| is real positive.
void fix_phase(Eigen::VectorXcd& v, double rel_tol = 1e-8);

}  // namespace embres
