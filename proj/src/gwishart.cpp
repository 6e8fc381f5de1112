#include "bdg/gwishart.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <limits>
#include <string>

namespace bdg {

void GWishartParams::validate() const {
  if (!std::isfinite(b) || b <= 2.0) throw DomainError("G-Wishart needs b > 2");
  if (D.size() < 1) throw InvalidDimension("G-Wishart scale is empty");
  if (!is_positive_definite(D)) throw DomainError("G-Wishart scale D is not positive definite");
}

GWishartParams posterior_params(const GWishartParams& prior, const SymMatrixd& scatter, double n) {
  if (scatter.size() != prior.D.size()) throw InvalidDimension("scatter and D sizes differ");
  return GWishartParams{prior.b + n, SymMatrixd(prior.D.matrix() + scatter.matrix())};
}

PrecisionMatrix::PrecisionMatrix(SymMatrixd k, Graph pattern)
    : k_(std::move(k)), pattern_(std::move(pattern)) {
  if (k_.size() != pattern_.p()) throw InvalidArgument("precision matrix and graph sizes differ");
  for (int i = 0; i < pattern_.p(); ++i)
    for (int j = i + 1; j < pattern_.p(); ++j)
      if (!pattern_.adjacent(i, j) && k_(i, j) != 0.0)
        throw InvalidArgument("precision matrix has a nonzero entry on non-edge (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
  if (!is_positive_definite(k_)) throw NotPositiveDefinite("precision matrix is not positive definite");
}

PrecisionMatrix PrecisionMatrix::stamped(const MatrixXd& k, Graph pattern) {
  MatrixXd m = (k + k.transpose()) / 2.0;
  for (int i = 0; i < pattern.p(); ++i)
    for (int j = i + 1; j < pattern.p(); ++j)
      if (!pattern.adjacent(i, j)) m(i, j) = m(j, i) = 0.0;
  return PrecisionMatrix(SymMatrixd(m), std::move(pattern));
}

SymMatrixd sample_wishart(const GWishartParams& params, Rng& rng) {
  const Index p = params.p();
  const double dof = params.b + static_cast<double>(p) - 1.0;
  // Upper Bartlett factor: diagonal sqrt(chi2(dof - i)), normals above.
  MatrixXd z = MatrixXd::Zero(p, p);
  for (Index i = 0; i < p; ++i) {
    z(i, i) = std::sqrt(chi_squared(rng, dof - static_cast<double>(i)));
    for (Index j = i + 1; j < p; ++j) z(i, j) = standard_normal(rng);
  }
  // Scale D^{-1} = L^{-T} L^{-1} for D = L L^T, so the draw is L^{-T} Z^T Z L^{-1}.
  const auto chol = cholesky(params.D);
  const MatrixXd a = chol.lower().transpose().triangularView<Eigen::Upper>().solve(z.transpose());
  return SymMatrixd(a * a.transpose());
}

namespace {

// K in P_G with (K^{-1})_ij = sigma_ij on the diagonal and on edges, found by
// minimizing tr(sigma K) - log|K| over the free entries.
std::optional<MatrixXd> complete_by_newton(const MatrixXd& sigma, const Graph& g, double tol,
                                           std::size_t max_iter) {
  const Index p = sigma.rows();
  std::vector<std::pair<Index, Index>> free;
  for (Index i = 0; i < p; ++i) free.emplace_back(i, i);
  for (const Edge e : g.edges()) free.emplace_back(e.i, e.j);
  const Index m = static_cast<Index>(free.size());

  auto objective = [&](const MatrixXd& k) -> std::optional<double> {
    Eigen::LLT<MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const double ld = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    if (!std::isfinite(ld)) return std::nullopt;
    return (sigma.cwiseProduct(k)).sum() - ld;
  };

  MatrixXd k = MatrixXd::Zero(p, p);
  for (Index i = 0; i < p; ++i) k(i, i) = 1.0 / sigma(i, i);
  double f = *objective(k);
  VectorXd grad(m);
  MatrixXd hess(m, m);
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const MatrixXd w = inverse_pd(k);
    double resid = 0.0;
    for (Index a = 0; a < m; ++a) {
      const auto [i, j] = free[static_cast<std::size_t>(a)];
      const double mult = i == j ? 1.0 : 2.0;
      grad(a) = mult * (sigma(i, j) - w(i, j));
      resid = std::max(resid, std::abs(sigma(i, j) - w(i, j)));
      for (Index b = 0; b <= a; ++b) {
        const auto [r, c] = free[static_cast<std::size_t>(b)];
        const double mb = r == c ? 1.0 : 2.0;
        hess(a, b) = hess(b, a) = 0.5 * mult * mb * (w(i, c) * w(j, r) + w(i, r) * w(j, c));
      }
    }
    if (resid < tol) return k;
    // Rounding floor: the residual has stopped shrinking.
    if (resid < std::sqrt(tol) && resid > 0.5 * best) {
      if (++stalled >= 3) return k;
    } else {
      stalled = 0;
    }
    best = std::min(best, resid);
    const VectorXd step = hess.ldlt().solve(-grad);
    const double decrement = -grad.dot(step);
    if (!(decrement > 0.0) || !std::isfinite(decrement)) return std::nullopt;
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      MatrixXd trial = k;
      for (Index a = 0; a < m; ++a) {
        const auto [i, j] = free[static_cast<std::size_t>(a)];
        trial(i, j) += t * step(a);
        if (i != j) trial(j, i) = trial(i, j);
      }
      const auto ft = objective(trial);
      if (ft && *ft <= f - 0.25 * t * decrement) {
        k = std::move(trial);
        f = *ft;
        moved = true;
        break;
      }
    }
    if (!moved) return resid < std::sqrt(tol) ? std::optional<MatrixXd>(k) : std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

PrecisionMatrix sample_gwishart_direct(const Graph& g, const GWishartParams& params, Rng& rng,
                                       DirectSamplerOptions opts) {
  if (g.p() != params.p()) throw InvalidDimension("graph and D sizes differ");
  if (!(opts.tol > 0.0)) throw DomainError("direct sampler tolerance must be positive");
  const SymMatrixd draw = sample_wishart(params, rng);
  const Index p = params.p();
  if (g.edge_count() == candidate_count(static_cast<int>(p))) return PrecisionMatrix(draw, g);

  const MatrixXd sigma = inverse_pd(draw.matrix());
  MatrixXd omega = sigma;

  std::vector<std::vector<Index>> nbrs(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i)
    for (int j : neighbors(g, i)) nbrs[static_cast<std::size_t>(i)].push_back(j);

  VectorXd updated(p);
  bool converged = false;
  for (std::size_t sweep = 0; sweep < opts.max_iter && !converged; ++sweep) {
    double change = 0.0;
    for (Index i = 0; i < p; ++i) {
      const auto& n = nbrs[static_cast<std::size_t>(i)];
      if (n.empty()) {
        updated.setZero();
      } else {
        const Index idx[1] = {i};
        const MatrixXd omega_n = submatrix(omega, n, n);
        const MatrixXd sigma_ni = submatrix(sigma, n, idx);
        const VectorXd beta = omega_n.llt().solve(sigma_ni);
        updated.noalias() = omega(Eigen::all, n) * beta;
      }
      for (Index r = 0; r < p; ++r) {
        if (r == i) continue;
        change = std::max(change, std::abs(omega(r, i) - updated(r)));
        omega(r, i) = omega(i, r) = updated(r);
      }
    }
    converged = change < opts.tol;
  }
  if (!converged) {
    const auto k = complete_by_newton(sigma, g, opts.tol, opts.newton_max_iter);
    if (!k)
      throw NoConvergence("direct G-Wishart sampler did not converge in " +
                              std::to_string(opts.max_iter) + " sweeps",
                          opts.max_iter);
    return PrecisionMatrix::stamped(*k, g);
  }
  return PrecisionMatrix::stamped(inverse_pd(omega), g);
}

double log_gwishart_unnorm(const PrecisionMatrix& k, const GWishartParams& params) {
  if (k.p() != params.p()) throw InvalidDimension("precision matrix and D sizes differ");
  return 0.5 * (params.b - 2.0) * logdet(k.matrix()) -
         0.5 * (params.D.matrix().cwiseProduct(k.matrix())).sum();
}

double log_norm_const_p1(double b, double d) {
  if (!(b > 2.0) || !(d > 0.0) || !std::isfinite(b) || !std::isfinite(d))
    throw DomainError("log_norm_const_p1 needs b > 2 and d > 0");
  return std::lgamma(b / 2.0) + (b / 2.0) * std::log(2.0 / d);
}

double log_J(double b, const Eigen::Matrix2d& d_block, double a11) {
  if (!(a11 > 0.0) || !std::isfinite(a11)) throw DomainError("log_J needs a11 > 0");
  if (!is_positive_definite(d_block)) throw DomainError("log_J needs a positive definite D block");
  const double d11 = d_block(0, 0);
  const double d12 = d_block(0, 1);
  const double d22 = d_block(1, 1);
  const double d11_2 = d11 - d12 * d12 / d22;
  return 0.5 * std::log(2.0 * std::numbers::pi / d22) + log_norm_const_p1(b, d22) +
         0.5 * (b - 1.0) * std::log(a11) - 0.5 * d11_2 * a11;
}

}  // namespace bdg
