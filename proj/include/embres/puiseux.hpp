#pragma once

#include <span>
#include <vector>

#include "embres/fourier.hpp"

namespace embres {

struct BranchSample {
  double s;
  cplx value;
};

// lambda(s) = lambda0 + sum_k coeffs[k-1] omega^{l k} s^{k/p},  omega = e^{2 pi i / p},
// with s^{1/p} the principal root. For p = 1 this is an ordinary power series.
struct BranchModel {
  int p = 1;
  cplx lambda0;
  std::vector<cplx> coeffs;
  double fit_residual = 0.0;         // RMS misfit over the samples
  bool p_detected = true;            // false when the samples could not discriminate p
  std::vector<int> branch_of_sample; // l for each sample (all 0 when p = 1)

  // Coefficient of s^power, zero if the model has no such term.
  cplx coefficient(double power) const;
  cplx operator()(double s, int branch = 0) const;
};

struct FitOptions {
  int max_power = 4;               // highest power of s in either model
  double selection_ratio = 1e-2;   // p = 2 must beat p = 1 by this factor
  double real_tol = 1e-12;
};

// Least-squares Puiseux fit with p chosen from {1, 2}. Needs at least six samples. Cycle detection
// needs samples on both sides of s = 0 or several samples at one s (more than one branch); otherwise
// p = 1 is fitted and p_detected is false.
BranchModel fit_branch(std::span<const BranchSample> samples, cplx lambda0, const FitOptions& opts = {});

}  // namespace embres
