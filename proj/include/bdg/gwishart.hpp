#pragma once

#include <cstddef>

#include "bdg/graph.hpp"
#include "bdg/matrix_kernel.hpp"
#include "bdg/rng.hpp"

namespace bdg {

/// Parameters of W_G(b, D) with density proportional to
/// |K|^{(b-2)/2} exp(-tr(D K)/2) on the cone of graph-constrained PD matrices.
struct GWishartParams {
  double b = 3.0;
  SymMatrixd D;

  /// Throws DomainError unless b > 2 and D is positive definite.
  void validate() const;
  Index p() const noexcept { return D.size(); }
};

/// Posterior hyperparameters (b + n, D + S).
GWishartParams posterior_params(const GWishartParams& prior, const SymMatrixd& scatter, double n);

/// PD matrix with exact zeros on every non-edge of its pattern.
class PrecisionMatrix {
 public:
  PrecisionMatrix() = default;

  /// Throws NotPositiveDefinite, or InvalidArgument when a non-edge entry is
  /// not exactly zero or the sizes disagree.
  PrecisionMatrix(SymMatrixd k, Graph pattern);

  /// Zeroes the non-edge entries of k, then validates.
  static PrecisionMatrix stamped(const MatrixXd& k, Graph pattern);

  const SymMatrixd& k() const noexcept { return k_; }
  const MatrixXd& matrix() const noexcept { return k_.matrix(); }
  const Graph& pattern() const noexcept { return pattern_; }
  Index p() const noexcept { return k_.size(); }
  double operator()(Index i, Index j) const { return k_(i, j); }

 private:
  SymMatrixd k_;
  Graph pattern_;
};

/// Wishart draw by the Bartlett construction with textbook degrees of
/// freedom b + p - 1 and scale D^{-1}.
SymMatrixd sample_wishart(const GWishartParams& params, Rng& rng);

struct DirectSamplerOptions {
  double tol = 1e-8;
  std::size_t max_iter = 1000;
  std::size_t newton_max_iter = 200;
};

/// Exact G-Wishart draw: invert a Wishart draw, then cycle the per-node
/// regressions on the neighbor sets until a full sweep changes the covariance
/// by less than tol (max-abs). Badly conditioned draws can make the sweeps
/// crawl; after max_iter sweeps the same completion is solved by damped
/// Newton on the free entries of K. Throws NoConvergence when that fails too.
PrecisionMatrix sample_gwishart_direct(const Graph& g, const GWishartParams& params, Rng& rng,
                                       DirectSamplerOptions opts = {});

/// ((b-2)/2) log|K| - tr(D K)/2.
double log_gwishart_unnorm(const PrecisionMatrix& k, const GWishartParams& params);

/// log of the p = 1 normalizing constant: lgamma(b/2) + (b/2) log(2/d).
double log_norm_const_p1(double b, double d);

/// log J(b, D, a11) for a 2x2 Wishart W(b, D): the normalizer of the
/// conditional density of (a12, a22) given a11.
double log_J(double b, const Eigen::Matrix2d& d_block, double a11);

}  // namespace bdg
