#include "embres/puiseux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include <Eigen/QR>

namespace embres {

namespace {

cplx root(double s, int p) { return p == 1 ? cplx(s) : std::sqrt(cplx(s)); }

cplx basis(double s, int k, int p, int branch) {
  const cplx r = root(s, p) * (branch % 2 == 0 ? 1.0 : -1.0);
  return std::pow(r, k);
}

struct Fit {
  std::vector<cplx> coeffs;
  std::vector<int> labels;
  double rms = 0.0;
};

Fit least_squares(std::span<const BranchSample> samples, cplx lambda0, int p, int terms, std::vector<int> labels,
                  bool real_only) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXcd a(n, terms);
  Eigen::VectorXcd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& smp = samples[static_cast<std::size_t>(i)];
    for (int k = 1; k <= terms; ++k) a(i, k - 1) = basis(smp.s, k, p, labels[static_cast<std::size_t>(i)]);
    y(i) = smp.value - lambda0;
  }
  Eigen::VectorXcd c;
  if (real_only) {
    const Eigen::VectorXd cr = a.real().colPivHouseholderQr().solve(y.real());
    c = cr.cast<cplx>();
  } else {
    c = a.colPivHouseholderQr().solve(y);
  }
  Fit fit;
  fit.coeffs.assign(c.data(), c.data() + c.size());
  fit.labels = std::move(labels);
  fit.rms = (a * c - y).norm() / std::sqrt(static_cast<double>(n));
  return fit;
}

// Alternating fit for p = 2: branch labels from the leading term, then refined per sample.
Fit fit_cycle(std::span<const BranchSample> samples, cplx lambda0, int terms) {
  std::vector<cplx> z;
  for (const auto& smp : samples) {
    const cplx r = root(smp.s, 2);
    z.push_back(std::abs(r) > 0.0 ? (smp.value - lambda0) / r : cplx(0.0));
  }
  const cplx ref = *std::max_element(z.begin(), z.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
  std::vector<int> labels;
  for (cplx zi : z) labels.push_back(std::real(zi * std::conj(ref)) >= 0.0 ? 0 : 1);

  Fit fit = least_squares(samples, lambda0, 2, terms, labels, false);
  for (int iter = 0; iter < 20; ++iter) {
    std::vector<int> next = fit.labels;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int l = 0; l < 2; ++l) {
        cplx model = lambda0;
        for (int k = 1; k <= terms; ++k) model += fit.coeffs[static_cast<std::size_t>(k - 1)] * basis(samples[i].s, k, 2, l);
        if (const double d = std::abs(model - samples[i].value); d < best) {
          best = d;
          next[i] = l;
        }
      }
    }
    if (next == fit.labels) break;
    fit = least_squares(samples, lambda0, 2, terms, std::move(next), false);
  }
  return fit;
}

}  // namespace

cplx BranchModel::coefficient(double power) const {
  const double k = power * p;
  const long ki = std::lround(k);
  if (std::abs(k - static_cast<double>(ki)) > 1e-12 || ki < 1 || ki > static_cast<long>(coeffs.size())) return 0.0;
  return coeffs[static_cast<std::size_t>(ki - 1)];
}

cplx BranchModel::operator()(double s, int branch) const {
  cplx v = lambda0;
  for (std::size_t k = 1; k <= coeffs.size(); ++k) v += coeffs[k - 1] * basis(s, static_cast<int>(k), p, branch);
  return v;
}

BranchModel fit_branch(std::span<const BranchSample> samples, cplx lambda0, const FitOptions& opts) {
  if (samples.size() < 6) throw std::invalid_argument("fit_branch: need at least six samples");
  if (opts.max_power < 1) throw std::invalid_argument("fit_branch: max_power must be >= 1");

  bool negative = false, positive = false, all_real = true;
  std::set<double> distinct;
  double scale = 0.0;
  for (const auto& smp : samples) {
    negative |= smp.s < 0.0;
    positive |= smp.s > 0.0;
    distinct.insert(smp.s);
    scale = std::max(scale, std::abs(smp.value - lambda0));
  }
  for (const auto& smp : samples)
    all_real &= std::abs(std::imag(smp.value - lambda0)) <= opts.real_tol * std::max(1.0, scale);
  all_real &= std::imag(lambda0) == 0.0;
  const bool detect = (negative && positive) || distinct.size() < samples.size();

  const int n = static_cast<int>(samples.size());
  const int terms1 = std::min(opts.max_power, n - 1);
  const Fit p1 = least_squares(samples, lambda0, 1, terms1, std::vector<int>(samples.size(), 0), all_real);

  BranchModel model;
  model.lambda0 = lambda0;
  model.p_detected = detect;
  model.p = 1;
  model.coeffs = p1.coeffs;
  model.fit_residual = p1.rms;
  model.branch_of_sample.assign(samples.size(), 0);
  // Real single-valued data stay on the real power series; repeated s means several branches.
  const bool single_valued = distinct.size() == samples.size();
  if (!detect || (all_real && single_valued) || p1.rms <= 1e-13 * std::max(1.0, scale)) return model;

  const int terms2 = std::min(2 * opts.max_power, n - 1);
  const Fit p2 = fit_cycle(samples, lambda0, terms2);
  if (p2.rms < opts.selection_ratio * p1.rms) {
    model.p = 2;
    model.coeffs = p2.coeffs;
    model.fit_residual = p2.rms;
    model.branch_of_sample = p2.labels;
  }
  return model;
}

}  // namespace embres
