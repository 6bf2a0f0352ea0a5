#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "embres/fourier.hpp"
#include "embres/model.hpp"
#include "embres/resolvent.hpp"
#include "embres/spectra.hpp"

namespace embres {

struct FermiGoldenRule {
  double im_lambda_ddot = 0.0;    // Im of the second s-derivative of the resonance at s = 0
  FourierVector source;           // Pi_perp Pdot u
  LimitingAbsorption resolvent;   // coefficients of R(lambda) applied to the source
  FourierVector regular;          // Pi_perp of the extrapolated resolvent coefficients
};

// Im lambda'' = -2 Im < Pi_perp R(lambda) Pi_perp Pdot u, Pdot u > at a simple embedded eigenvalue of
// the inviscid, unperturbed fiber operator, with R(lambda) realized by limiting absorption on |n1| <= N.
// Throws std::invalid_argument if the eigenvalue is not simple on that truncation.
FermiGoldenRule fermi_golden_rule(const PotentialSpec& spec, const Eigenpair& pair, int N,
                                  const LimitOptions& opts = {});

struct AdotMatrix {
  Eigen::MatrixXcd entries;             // Adot_ij = -< Pdot E Pdot u_i, u_j >
  Eigen::MatrixXcd first_order;         // < Pdot u_i, u_j >, the s^1 term of the effective Hamiltonian
  std::vector<FourierVector> sources;   // Pi_perp Pdot u_i
  std::vector<LimitingAbsorption> resolvents;
};

// `basis` must be orthonormal and share one eigenvalue. `pins`, when given, holds one list of
// pinned coefficients per basis vector.
AdotMatrix adot_matrix(const PotentialSpec& spec, std::span<const Eigenpair> basis, int N,
                       const LimitOptions& opts = {},
                       std::span<const std::vector<PinnedCoefficient>> pins = {});

// The two s^2 coefficients ((A11 + A22) +- sqrt((A11 - A22)^2 + 4 A12 A21)) / 2, '+' first.
std::pair<cplx, cplx> quadratic_branches(const Eigen::MatrixXcd& adot);

}  // namespace embres
