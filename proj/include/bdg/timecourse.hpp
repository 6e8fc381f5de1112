#pragma once

// Longitudinal extension: x_t ~ N(f(t), K^{-1}) with one stable graph and a
// cubic-spline mean curve f_i(t) = h(t)^T beta_i per node. The chain
// alternates a Gibbs sweep over the beta_i with one birth-death step on the
// residuals.

#include <utility>
#include <vector>

#include "bdg/bdmcmc.hpp"
#include "bdg/matrix_kernel.hpp"
#include "bdg/rng.hpp"

namespace bdg {

/// Natural cubic spline basis on fixed knots, intercept included.
class SplineBasis {
 public:
  SplineBasis() = default;
  explicit SplineBasis(std::vector<double> knots);

  Index m() const noexcept { return static_cast<Index>(knots_.size()); }
  const std::vector<double>& knots() const noexcept { return knots_; }

  /// h(t), an m-vector: 1, t, then the m - 2 truncated-cubic terms.
  VectorXd evaluate(double t) const;
  /// Rows h(t_k)^T.
  MatrixXd design(const VectorXd& times) const;

 private:
  double scaled(double t) const;
  double d(std::size_t k, double u) const;

  std::vector<double> knots_;
  std::vector<double> u_;  // knots mapped to [0, 1]
};

/// m knots at equally spaced quantiles of times (min and max included).
/// Throws InvalidBasisSize for m < 2, fewer than 2 distinct times, or
/// repeated knots.
SplineBasis natural_cubic_basis(const VectorXd& times, Index m = 5);

struct BetaState {
  std::vector<VectorXd> beta;  // per node
  std::vector<VectorXd> mu0;
  std::vector<SymMatrixd> b0;

  /// beta = 0, mu0 = 0, B0 = prior_var * I for every node.
  static BetaState zeros(Index p, Index m, double prior_var = 10.0);
  Index p() const noexcept { return static_cast<Index>(beta.size()); }
};

/// Gaussian full conditional of beta_i given K, the data and the other
/// curves: B_i = (B0^{-1} + k_ii H^T H)^{-1},
/// mu_i = B_i (B0^{-1} mu0 + sum_t h(t) K_{i,.} (x_t - f_{-i}(t))).
std::pair<VectorXd, SymMatrixd> beta_conditional(Index i, const VectorXd& times, const MatrixXd& x,
                                                 const MatrixXd& k, const SplineBasis& basis,
                                                 const BetaState& beta);

/// Mean curves at every time point (T x p).
MatrixXd mean_curves(const MatrixXd& design, const BetaState& beta);

struct TimecourseConfig {
  ChainConfig chain;  // data_scatter and n are filled in from the residuals
  VectorXd times;
  MatrixXd x;  // T x p
  SplineBasis basis;
  BetaState beta;  // priors and starting values
};

struct BetaDraw {
  std::size_t step = 0;
  std::vector<VectorXd> beta;
};

struct TimecourseResult {
  ChainTrace trace;
  std::vector<BetaDraw> beta_trace;  // at the K snapshot steps
  BetaState final_beta;
};

TimecourseResult run_timecourse_chain(const TimecourseConfig& cfg);

}  // namespace bdg
