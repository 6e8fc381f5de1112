#include "bdg/timecourse.hpp"

#include <algorithm>
#include <cmath>

namespace bdg {

SplineBasis::SplineBasis(std::vector<double> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw InvalidBasisSize("spline basis needs at least 2 knots");
  for (std::size_t k = 1; k < knots_.size(); ++k)
    if (!(knots_[k] > knots_[k - 1])) throw InvalidBasisSize("spline knots must be strictly increasing");
  for (double t : knots_) u_.push_back(scaled(t));
}

double SplineBasis::scaled(double t) const {
  return (t - knots_.front()) / (knots_.back() - knots_.front());
}

double SplineBasis::d(std::size_t k, double u) const {
  const auto cube = [](double v) { return v > 0.0 ? v * v * v : 0.0; };
  const double last = u_.back();
  return (cube(u - u_[k]) - cube(u - last)) / (last - u_[k]);
}

VectorXd SplineBasis::evaluate(double t) const {
  const Index m = this->m();
  const double u = scaled(t);
  VectorXd h(m);
  h(0) = 1.0;
  h(1) = u;
  const std::size_t kk = knots_.size();
  for (std::size_t k = 0; k + 2 < kk; ++k) h(static_cast<Index>(k) + 2) = d(k, u) - d(kk - 2, u);
  return h;
}

MatrixXd SplineBasis::design(const VectorXd& times) const {
  MatrixXd h(times.size(), m());
  for (Index r = 0; r < times.size(); ++r) h.row(r) = evaluate(times(r)).transpose();
  return h;
}

SplineBasis natural_cubic_basis(const VectorXd& times, Index m) {
  if (m < 2) throw InvalidBasisSize("basis size m must be >= 2");
  std::vector<double> sorted(times.data(), times.data() + times.size());
  for (double t : sorted)
    if (!std::isfinite(t)) throw InvalidBasisSize("time points must be finite");
  std::sort(sorted.begin(), sorted.end());
  if (sorted.empty() || sorted.front() == sorted.back())
    throw InvalidBasisSize("spline fitting needs at least 2 distinct time points");
  std::vector<double> knots;
  const double last = static_cast<double>(sorted.size() - 1);
  for (Index k = 0; k < m; ++k) {
    const double pos = last * static_cast<double>(k) / static_cast<double>(m - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    knots.push_back(sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]));
  }
  for (std::size_t k = 1; k < knots.size(); ++k)
    if (!(knots[k] > knots[k - 1]))
      throw InvalidBasisSize("basis size " + std::to_string(m) + " gives repeated quantile knots");
  return SplineBasis(std::move(knots));
}

BetaState BetaState::zeros(Index p, Index m, double prior_var) {
  BetaState s;
  for (Index i = 0; i < p; ++i) {
    s.beta.push_back(VectorXd::Zero(m));
    s.mu0.push_back(VectorXd::Zero(m));
    s.b0.push_back(SymMatrixd(MatrixXd::Identity(m, m) * prior_var));
  }
  return s;
}

MatrixXd mean_curves(const MatrixXd& design, const BetaState& beta) {
  MatrixXd f(design.rows(), beta.p());
  for (Index i = 0; i < beta.p(); ++i) f.col(i) = design * beta.beta[static_cast<std::size_t>(i)];
  return f;
}

namespace {

std::pair<VectorXd, SymMatrixd> conditional(Index i, const MatrixXd& h, const MatrixXd& x, const MatrixXd& k,
                                            const BetaState& beta) {
  const auto ui = static_cast<std::size_t>(i);
  const MatrixXd b0_inv = inverse_pd(beta.b0[ui].matrix());
  MatrixXd others = mean_curves(h, beta);
  others.col(i).setZero();
  const MatrixXd resid = x - others;
  const MatrixXd precision = b0_inv + k(i, i) * (h.transpose() * h);
  const SymMatrixd b(inverse_pd(precision));
  const VectorXd lin = b0_inv * beta.mu0[ui] + h.transpose() * (resid * k.col(i));
  return {b.matrix() * lin, b};
}

void check_dims(const MatrixXd& x, const VectorXd& times, const MatrixXd& k, const SplineBasis& basis,
                const BetaState& beta) {
  const Index p = x.cols();
  if (times.size() != x.rows()) throw InvalidDimension("times and data rows differ");
  if (k.rows() != p || k.cols() != p) throw InvalidDimension("K and data columns differ");
  if (beta.p() != p || static_cast<Index>(beta.mu0.size()) != p || static_cast<Index>(beta.b0.size()) != p)
    throw InvalidDimension("beta state and data columns differ");
  for (Index i = 0; i < p; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (beta.beta[ui].size() != basis.m() || beta.mu0[ui].size() != basis.m() || beta.b0[ui].size() != basis.m())
      throw InvalidDimension("beta vectors must have the basis size");
  }
}

}  // namespace

std::pair<VectorXd, SymMatrixd> beta_conditional(Index i, const VectorXd& times, const MatrixXd& x,
                                                 const MatrixXd& k, const SplineBasis& basis,
                                                 const BetaState& beta) {
  check_dims(x, times, k, basis, beta);
  if (i < 0 || i >= x.cols()) throw InvalidArgument("node index out of range");
  if (!is_positive_definite(k)) throw NotPositiveDefinite("beta_conditional: K is not positive definite");
  return conditional(i, basis.design(times), x, k, beta);
}

TimecourseResult run_timecourse_chain(const TimecourseConfig& cfg) {
  if (cfg.x.rows() < 2) throw ConfigError("time-course data needs at least 2 time points");
  if (cfg.basis.m() < 2) throw ConfigError("time-course chain needs a spline basis");
  const Index p = cfg.x.cols();
  ChainConfig chain = cfg.chain;
  chain.n = static_cast<double>(cfg.x.rows());
  chain.data_scatter = SymMatrixd::zero(p);
  chain.validate();
  check_dims(cfg.x, cfg.times, MatrixXd::Identity(p, p), cfg.basis, cfg.beta);

  const MatrixXd h = cfg.basis.design(cfg.times);
  const auto scatter = [&](const BetaState& b) {
    const MatrixXd r = cfg.x - mean_curves(h, b);
    return SymMatrixd(r.transpose() * r);
  };

  Rng rng = make_stream(chain.seed);
  BetaState beta = cfg.beta;
  chain.data_scatter = scatter(beta);
  ChainState state = initial_state(chain, posterior_params(chain.gw_prior, chain.data_scatter, chain.n), rng);

  TimecourseResult out;
  out.trace = ChainTrace(static_cast<int>(p), chain.burn_in);
  for (std::size_t t = 0; t < chain.iterations; ++t) {
    for (Index i = 0; i < p; ++i) {
      const auto [mu, b] = conditional(i, h, cfg.x, state.k.matrix(), beta);
      const MatrixXd l = cholesky(b).lower();
      VectorXd z(mu.size());
      for (Index c = 0; c < z.size(); ++c) z(c) = standard_normal(rng);
      beta.beta[static_cast<std::size_t>(i)] = mu + l * z;
    }
    chain.data_scatter = scatter(beta);
    const GWishartParams post = posterior_params(chain.gw_prior, chain.data_scatter, chain.n);
    StepResult r;
    try {
      r = bdmcmc_step(state, chain, post, rng);
    } catch (const NumericalError& e) {
      throw NumericalError("step " + std::to_string(t) + ": " + e.what());
    }
    const bool snap = t >= chain.burn_in && (t - chain.burn_in) % chain.snapshot_stride == 0;
    out.trace.record(state.graph, r.weight, snap ? &state.k.matrix() : nullptr);
    out.trace.clamped += r.clamped;
    if (snap) out.beta_trace.push_back({t, beta.beta});
    state = std::move(r.next);
  }
  out.final_beta = std::move(beta);
  return out;
}

}  // namespace bdg
