#pragma once

// Continuous-time birth-death sampler over (graph, precision matrix).
//
// Every candidate edge carries a rate: present edges die at delta_e, absent
// ones are born at beta_e. The chain holds each state for the mean waiting
// time 1/(sum of rates), jumps to one neighbor graph with probability
// proportional to its rate, then redraws K from the G-Wishart posterior of
// the new graph. Prior normalizing-constant ratios never appear explicitly:
// they are replaced by H evaluated at an auxiliary prior draw (exchange).

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bdg/graph.hpp"
#include "bdg/gwishart.hpp"
#include "bdg/matrix_kernel.hpp"
#include "bdg/rng.hpp"

namespace bdg {

/// Where the auxiliary prior draw comes from.
///  Shared:  one draw from W_G(b, D) under the current graph, reused by all edges.
///  PerEdge: one draw per candidate edge from W_{G'}(b, D), G' the proposed graph.
enum class ExchangeMode { Shared, PerEdge };

/// How a log density ratio r becomes a log rate.
///  Ratio:  log rate = r.
///  Capped: log rate = min(r, 0), i.e. rate = min(1, ratio).
enum class RateForm { Ratio, Capped };

std::string to_string(ExchangeMode mode);
std::string to_string(RateForm form);
ExchangeMode parse_exchange_mode(const std::string& s);
RateForm parse_rate_form(const std::string& s);

inline constexpr double kLogRateClamp = 700.0;
inline constexpr double kDegenerateFloor = 1e-12;

struct ChainConfig {
  std::size_t iterations = 0;
  std::size_t burn_in = 0;
  GraphPrior prior = UniformPrior{};
  GWishartParams gw_prior;
  SymMatrixd data_scatter;  // S = x^T x
  double n = 0.0;
  std::uint64_t seed = 0;
  std::optional<Graph> initial_graph;  // empty graph when unset
  std::size_t snapshot_stride = 10;
  ExchangeMode exchange_mode = ExchangeMode::Shared;
  RateForm rate_form = RateForm::Ratio;
  DirectSamplerOptions sampler;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// K with (i,j) zeroed and (j,j) set to the conditional term c computed from
/// that zeroed matrix: c = K0[j,-j] K[-j,-j]^{-1} K0[-j,j].
SymMatrixd k0_completion(const PrecisionMatrix& k, Edge e);

/// K with the {i,j} block replaced by K[e,-e] K[-e,-e]^{-1} K[-e,e]
/// (the zero block when p = 2).
SymMatrixd k1_completion(const PrecisionMatrix& k, Edge e);

/// log H(K, scale, e). Throws DegenerateEdge when k_ii - k1_ii <= 1e-12.
double log_H(const PrecisionMatrix& k, const SymMatrixd& scale, Edge e);

struct EdgeRate {
  Edge edge;
  Move move;
  double log_rate = 0.0;
};

struct RateTable {
  std::vector<EdgeRate> events;  // canonical edge order
  double log_total = 0.0;        // log(beta(K) + delta(K))
  std::size_t clamped = 0;       // log-rates pulled back into [-700, 700]
};

/// Rates with one shared auxiliary draw k_tilde (pattern g).
RateTable compute_rates(const Graph& g, const PrecisionMatrix& k, const PrecisionMatrix& k_tilde,
                        const ChainConfig& cfg);

/// Rates with a fresh auxiliary draw under each proposed graph.
RateTable compute_rates_per_edge(const Graph& g, const PrecisionMatrix& k, const ChainConfig& cfg,
                                 Rng& rng);

/// 1 / (beta(K) + delta(K)).
double waiting_time(const RateTable& rt);

/// Categorical draw over events with probability rate / total (Gumbel-max).
EdgeRate select_jump(const RateTable& rt, Rng& rng);

struct ChainState {
  Graph graph;
  PrecisionMatrix k;
};

struct StepResult {
  ChainState next;
  double weight = 0.0;  // holding time of the pre-jump state
  EdgeRate jump;
  std::size_t clamped = 0;
};

/// One iteration. `post` are the posterior hyperparameters (b + n, D + S).
StepResult bdmcmc_step(const ChainState& state, const ChainConfig& cfg, const GWishartParams& post,
                       Rng& rng);

/// Initial state: cfg.initial_graph (default empty) with K drawn from its posterior.
ChainState initial_state(const ChainConfig& cfg, const GWishartParams& post, Rng& rng);

struct TraceStep {
  std::uint32_t graph_id = 0;
  double weight = 0.0;
};

struct Snapshot {
  std::size_t step = 0;
  MatrixXd k;
};

/// Weighted record of a run. Every step is kept (burn-in included); totals
/// and snapshots cover post-burn-in steps only.
class ChainTrace {
 public:
  ChainTrace() = default;
  ChainTrace(int p, std::size_t burn_in) : p_(p), burn_in_(burn_in) {}

  /// Appends one step. `k` is stored when given and the step is past burn-in.
  void record(const Graph& g, double weight, const MatrixXd* k = nullptr);

  int p() const noexcept { return p_; }
  std::size_t burn_in() const noexcept { return burn_in_; }
  const std::vector<TraceStep>& steps() const noexcept { return steps_; }
  const std::vector<Snapshot>& snapshots() const noexcept { return snapshots_; }
  const std::vector<Graph>& graphs() const noexcept { return graphs_; }
  /// Post-burn-in weight per graph id.
  const std::vector<double>& totals() const noexcept { return totals_; }
  double total_weight() const;
  std::size_t counted_steps() const;

  std::size_t clamped = 0;

 private:
  std::uint32_t intern(const Graph& g);

  int p_ = 0;
  std::size_t burn_in_ = 0;
  std::vector<TraceStep> steps_;
  std::vector<Snapshot> snapshots_;
  std::vector<Graph> graphs_;
  std::vector<double> totals_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

/// Runs cfg.iterations steps from initial_state. Errors carry the step index.
ChainTrace run_chain(const ChainConfig& cfg);

}  // namespace bdg
