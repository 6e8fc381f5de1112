#include "bdg/bdmcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bdg {

std::string to_string(ExchangeMode mode) {
  return mode == ExchangeMode::Shared ? "shared" : "per_edge";
}

std::string to_string(RateForm form) { return form == RateForm::Ratio ? "ratio" : "capped"; }

ExchangeMode parse_exchange_mode(const std::string& s) {
  if (s == "shared") return ExchangeMode::Shared;
  if (s == "per_edge") return ExchangeMode::PerEdge;
  throw ConfigError("exchange_mode must be shared|per_edge, got '" + s + "'");
}

RateForm parse_rate_form(const std::string& s) {
  if (s == "ratio") return RateForm::Ratio;
  if (s == "capped") return RateForm::Capped;
  throw ConfigError("rate_form must be ratio|capped, got '" + s + "'");
}

void ChainConfig::validate() const {
  const Index p = gw_prior.D.size();
  if (p < 2) throw ConfigError("need p >= 2 nodes: a single node has no candidate edges");
  if (iterations == 0) throw ConfigError("iterations must be positive");
  if (burn_in >= iterations) throw ConfigError("burn_in must be smaller than iterations");
  if (!(n >= 0.0) || !std::isfinite(n)) throw ConfigError("sample size n must be >= 0");
  if (snapshot_stride == 0) throw ConfigError("snapshot stride must be positive");
  if (data_scatter.size() != p) throw ConfigError("scatter matrix and D sizes differ");
  if (initial_graph && initial_graph->p() != p) throw ConfigError("initial graph has the wrong size");
  try {
    gw_prior.validate();
    ::bdg::validate(prior);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

namespace {

// Pieces of the two completions for edge e = (i, j), read off K and
// Sigma = K^{-1} in O(1):
//   K1 block = K_ee - (Sigma_ee)^{-1}, so a11 = k_ii - k1_ii = s_jj / det(Sigma_ee);
//   c uses the column K[-j, j] with its i-th entry zeroed, expanded with the
//   identities Sigma K = I restricted to that column.
struct CompletionTerms {
  double a11;
  double k1_ij;
  double k1_jj;
  double c;
};

CompletionTerms completion_terms(const MatrixXd& k, const MatrixXd& sigma, Edge e) {
  const Index i = e.i, j = e.j;
  const double s_ii = sigma(i, i), s_ij = sigma(i, j), s_jj = sigma(j, j);
  const double det = s_ii * s_jj - s_ij * s_ij;
  const double k_ij = k(i, j), k_jj = k(j, j);
  const double cross = 1.0 - s_jj * k_jj - k_ij * s_ij;
  const double quad = -k_jj * (1.0 - s_jj * k_jj) + 2.0 * k_ij * k_jj * s_ij + k_ij * k_ij * s_ii;
  return CompletionTerms{
      .a11 = s_jj / det,
      .k1_ij = k_ij + s_ij / det,
      .k1_jj = k_jj - s_ii / det,
      .c = quad - cross * cross / s_jj,
  };
}

double log_H_terms(const CompletionTerms& t, const MatrixXd& scale, Edge e) {
  if (!(t.a11 > kDegenerateFloor))
    throw DegenerateEdge("k_ii - k1_ii is numerically zero for edge (" + std::to_string(e.i) +
                             "," + std::to_string(e.j) + ")",
                         e.i, e.j);
  const double d_ii = scale(e.i, e.i), d_ij = scale(e.i, e.j), d_jj = scale(e.j, e.j);
  // K0 - K1 is zero outside the {i,j} block.
  const double trace = d_ii * t.a11 - 2.0 * d_ij * t.k1_ij + d_jj * (t.c - t.k1_jj);
  const double d_ii_2 = d_ii - d_ij * d_ij / d_jj;
  return 0.5 * std::log(d_jj / (2.0 * std::numbers::pi * t.a11)) - 0.5 * (trace - d_ii_2 * t.a11);
}

double finish_rate(double log_ratio, RateForm form, std::size_t& clamped) {
  if (std::isnan(log_ratio))
    throw NumericalError("rate computation produced NaN");
  double r = form == RateForm::Capped ? std::min(log_ratio, 0.0) : log_ratio;
  if (r > kLogRateClamp || r < -kLogRateClamp) {
    r = std::clamp(r, -kLogRateClamp, kLogRateClamp);
    ++clamped;
  }
  return r;
}

double log_sum_exp(const std::vector<EdgeRate>& events) {
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& ev : events) mx = std::max(mx, ev.log_rate);
  double acc = 0.0;
  for (const auto& ev : events) acc += std::exp(ev.log_rate - mx);
  return mx + std::log(acc);
}

void check_edge(const PrecisionMatrix& k, Edge e) {
  if (e.i < 0 || e.j <= e.i || e.j >= k.p()) throw InvalidEdge("edge out of range for K");
}

}  // namespace

SymMatrixd k0_completion(const PrecisionMatrix& k, Edge e) {
  check_edge(k, e);
  MatrixXd m = k.matrix();
  m(e.i, e.j) = m(e.j, e.i) = 0.0;
  const Index target[1] = {e.j};
  const auto rest = complement(k.p(), target);
  const double c = schur_update(m, target, rest)(0, 0);
  m(e.j, e.j) = c;
  return SymMatrixd(m);
}

SymMatrixd k1_completion(const PrecisionMatrix& k, Edge e) {
  check_edge(k, e);
  const Index block[2] = {e.i, e.j};
  const auto rest = complement(k.p(), block);
  const MatrixXd s = schur_update(k.matrix(), block, rest);
  MatrixXd m = k.matrix();
  m(e.i, e.i) = s(0, 0);
  m(e.i, e.j) = m(e.j, e.i) = s(0, 1);
  m(e.j, e.j) = s(1, 1);
  return SymMatrixd(m);
}

double log_H(const PrecisionMatrix& k, const SymMatrixd& scale, Edge e) {
  check_edge(k, e);
  if (scale.size() != k.p()) throw InvalidDimension("log_H: scale and K sizes differ");
  const SymMatrixd k0 = k0_completion(k, e);
  const SymMatrixd k1 = k1_completion(k, e);
  const CompletionTerms t{
      .a11 = k(e.i, e.i) - k1(e.i, e.i),
      .k1_ij = k1(e.i, e.j),
      .k1_jj = k1(e.j, e.j),
      .c = k0(e.j, e.j),
  };
  return log_H_terms(t, scale.matrix(), e);
}

RateTable compute_rates(const Graph& g, const PrecisionMatrix& k, const PrecisionMatrix& k_tilde,
                        const ChainConfig& cfg) {
  const int p = g.p();
  const MatrixXd sigma = inverse_pd(k.matrix());
  const MatrixXd sigma_tilde = inverse_pd(k_tilde.matrix());
  const MatrixXd d_post = cfg.gw_prior.D.matrix() + cfg.data_scatter.matrix();
  const MatrixXd& d = cfg.gw_prior.D.matrix();

  RateTable rt;
  rt.events.reserve(candidate_count(p));
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const Edge e{i, j};
      const Move move = g.adjacent(i, j) ? Move::Death : Move::Birth;
      const double h_post = log_H_terms(completion_terms(k.matrix(), sigma, e), d_post, e);
      const double h_prior = log_H_terms(completion_terms(k_tilde.matrix(), sigma_tilde, e), d, e);
      const double diff = move == Move::Death ? h_post - h_prior : h_prior - h_post;
      const double r = log_prior_ratio(cfg.prior, g, e, move) + diff;
      rt.events.push_back({e, move, finish_rate(r, cfg.rate_form, rt.clamped)});
    }
  }
  rt.log_total = log_sum_exp(rt.events);
  return rt;
}

RateTable compute_rates_per_edge(const Graph& g, const PrecisionMatrix& k, const ChainConfig& cfg,
                                 Rng& rng) {
  const int p = g.p();
  const MatrixXd sigma = inverse_pd(k.matrix());
  const MatrixXd d_post = cfg.gw_prior.D.matrix() + cfg.data_scatter.matrix();
  const MatrixXd& d = cfg.gw_prior.D.matrix();

  RateTable rt;
  rt.events.reserve(candidate_count(p));
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const Edge e{i, j};
      const Move move = g.adjacent(i, j) ? Move::Death : Move::Birth;
      const PrecisionMatrix aux =
          sample_gwishart_direct(toggle_edge(g, e), cfg.gw_prior, rng, cfg.sampler);
      const MatrixXd sigma_aux = inverse_pd(aux.matrix());
      const double h_post = log_H_terms(completion_terms(k.matrix(), sigma, e), d_post, e);
      const double h_prior = log_H_terms(completion_terms(aux.matrix(), sigma_aux, e), d, e);
      const double diff = move == Move::Death ? h_post - h_prior : h_prior - h_post;
      const double r = log_prior_ratio(cfg.prior, g, e, move) + diff;
      rt.events.push_back({e, move, finish_rate(r, cfg.rate_form, rt.clamped)});
    }
  }
  rt.log_total = log_sum_exp(rt.events);
  return rt;
}

double waiting_time(const RateTable& rt) { return std::exp(-rt.log_total); }

EdgeRate select_jump(const RateTable& rt, Rng& rng) {
  if (rt.events.empty()) throw InvalidArgument("select_jump: empty rate table");
  std::size_t best = 0;
  double best_key = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rt.events.size(); ++k) {
    const double gumbel = -std::log(-std::log(uniform_open(rng)));
    const double key = rt.events[k].log_rate + gumbel;
    if (key > best_key) {
      best_key = key;
      best = k;
    }
  }
  return rt.events[best];
}

ChainState initial_state(const ChainConfig& cfg, const GWishartParams& post, Rng& rng) {
  Graph g = cfg.initial_graph.value_or(Graph::empty(static_cast<int>(cfg.gw_prior.p())));
  PrecisionMatrix k = sample_gwishart_direct(g, post, rng, cfg.sampler);
  return ChainState{std::move(g), std::move(k)};
}

StepResult bdmcmc_step(const ChainState& state, const ChainConfig& cfg, const GWishartParams& post,
                       Rng& rng) {
  RateTable rt;
  if (cfg.exchange_mode == ExchangeMode::Shared) {
    const PrecisionMatrix k_tilde =
        sample_gwishart_direct(state.graph, cfg.gw_prior, rng, cfg.sampler);
    rt = compute_rates(state.graph, state.k, k_tilde, cfg);
  } else {
    rt = compute_rates_per_edge(state.graph, state.k, cfg, rng);
  }
  const double weight = waiting_time(rt);
  const EdgeRate jump = select_jump(rt, rng);
  Graph next = toggle_edge(state.graph, jump.edge);
  PrecisionMatrix k = sample_gwishart_direct(next, post, rng, cfg.sampler);
  return StepResult{ChainState{std::move(next), std::move(k)}, weight, jump, rt.clamped};
}

std::uint32_t ChainTrace::intern(const Graph& g) {
  auto key = g.canonical();
  auto it = ids_.find(key);
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(graphs_.size());
  ids_.emplace(std::move(key), id);
  graphs_.push_back(g);
  totals_.push_back(0.0);
  return id;
}

void ChainTrace::record(const Graph& g, double weight, const MatrixXd* k) {
  if (!(weight > 0.0)) throw NumericalError("trace weights must be positive");
  const std::uint32_t id = intern(g);
  const std::size_t step = steps_.size();
  steps_.push_back({id, weight});
  if (step >= burn_in_) {
    totals_[id] += weight;
    if (k) snapshots_.push_back({step, *k});
  }
}

double ChainTrace::total_weight() const {
  double s = 0.0;
  for (double w : totals_) s += w;
  return s;
}

std::size_t ChainTrace::counted_steps() const {
  return steps_.size() > burn_in_ ? steps_.size() - burn_in_ : 0;
}

namespace {

template <typename E>
[[noreturn]] void rethrow_at(const E& e, std::size_t step);

template <>
[[noreturn]] void rethrow_at(const DegenerateEdge& e, std::size_t step) {
  throw DegenerateEdge("step " + std::to_string(step) + ": " + e.what(), e.i(), e.j());
}
template <>
[[noreturn]] void rethrow_at(const NoConvergence& e, std::size_t step) {
  throw NoConvergence("step " + std::to_string(step) + ": " + e.what(), e.max_iter());
}
template <>
[[noreturn]] void rethrow_at(const NotPositiveDefinite& e, std::size_t step) {
  throw NotPositiveDefinite("step " + std::to_string(step) + ": " + std::string(e.what()));
}
template <>
[[noreturn]] void rethrow_at(const NumericalError& e, std::size_t step) {
  throw NumericalError("step " + std::to_string(step) + ": " + std::string(e.what()));
}

}  // namespace

ChainTrace run_chain(const ChainConfig& cfg) {
  cfg.validate();
  const GWishartParams post = posterior_params(cfg.gw_prior, cfg.data_scatter, cfg.n);
  Rng rng = make_stream(cfg.seed);
  ChainState state = initial_state(cfg, post, rng);
  ChainTrace trace(state.graph.p(), cfg.burn_in);

  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    StepResult r;
    try {
      r = bdmcmc_step(state, cfg, post, rng);
    } catch (const DegenerateEdge& e) {
      rethrow_at(e, t);
    } catch (const NoConvergence& e) {
      rethrow_at(e, t);
    } catch (const NotPositiveDefinite& e) {
      rethrow_at(e, t);
    } catch (const NumericalError& e) {
      rethrow_at(e, t);
    }
    const bool snap = t >= cfg.burn_in && (t - cfg.burn_in) % cfg.snapshot_stride == 0;
    trace.record(state.graph, r.weight, snap ? &state.k.matrix() : nullptr);
    trace.clamped += r.clamped;
    state = std::move(r.next);
  }
  return trace;
}

}  // namespace bdg
