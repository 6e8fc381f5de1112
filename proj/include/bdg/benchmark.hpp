#pragma once

// Synthetic graphical models, Gaussian data, and the accuracy metrics used to
// score a fitted chain against a known truth.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdg/bdmcmc.hpp"
#include "bdg/graph.hpp"
#include "bdg/gwishart.hpp"
#include "bdg/matrix_kernel.hpp"
#include "bdg/rng.hpp"

namespace bdg {

enum class ModelKind { Circle, Star, AR1, AR2, Random, Cluster, ScaleFree };

std::string to_string(ModelKind kind);
/// Case-insensitive; throws ConfigError listing the valid names.
ModelKind parse_model_kind(const std::string& name);
const std::vector<ModelKind>& all_model_kinds();

struct SyntheticModel {
  ModelKind kind = ModelKind::Circle;
  int p = 10;
  std::uint64_t seed = 0;
};

struct TrueModel {
  Graph graph;
  SymMatrixd k;
  SymMatrixd sigma;
};

/// Builds the graph and its precision matrix. Random, Cluster and ScaleFree
/// draw K from W_G(3, I_p). Throws InvalidDimension for unsupported p.
TrueModel generate_model(const SyntheticModel& m);

struct MvnSample {
  MatrixXd x;    // n x p
  SymMatrixd s;  // x^T x
};

/// n iid N(0, sigma) rows.
MvnSample sample_mvn(const SymMatrixd& sigma, std::size_t n, Rng& rng);
/// n iid N(0, k^{-1}) rows.
MvnSample sample_mvn_precision(const SymMatrixd& k, std::size_t n, Rng& rng);

/// Sum over candidate edges of |p_e - I(e in truth)|.
double calibration_error(const MatrixXd& phat, const Graph& truth);

/// 2TP / (2TP + FP + FN); 1 when both graphs are empty.
double f1_score(const Graph& estimate, const Graph& truth);

/// Edges with p_e > threshold.
Graph threshold_graph(const MatrixXd& phat, double threshold = 0.5);

/// KL(N(0, K_true^{-1}) || N(0, K_hat^{-1})) =
/// (tr(K_true^{-1} K_hat) - p - log(|K_hat| / |K_true|)) / 2.
double kl_divergence(const SymMatrixd& k_true, const SymMatrixd& k_hat);

struct Scenario {
  ModelKind kind = ModelKind::Circle;
  int p = 10;
  std::size_t n = 30;
  std::size_t reps = 10;
  std::size_t iterations = 60000;
  std::size_t burn_in = 30000;
};

struct BenchOptions {
  std::uint64_t seed = 0;
  double threshold = 0.5;
  unsigned threads = 1;
  ExchangeMode exchange_mode = ExchangeMode::Shared;
  RateForm rate_form = RateForm::Ratio;
};

struct RepResult {
  std::size_t scenario = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double f1 = 0.0;
  double ce = 0.0;
  double kl = 0.0;
  double seconds = 0.0;
};

struct MetricStats {
  double mean = 0.0;
  double sd = 0.0;
};

struct ScenarioSummary {
  Scenario scenario;
  std::size_t succeeded = 0;
  std::size_t failed = 0;
  MetricStats f1, ce, kl, seconds;
};

struct BenchReport {
  std::vector<RepResult> reps;  // ordered by (scenario, rep)
  std::vector<ScenarioSummary> summaries;
  bool partial() const;
};

/// Seed of replication `rep` of scenario `index`.
std::uint64_t replication_seed(std::uint64_t master, std::size_t index, std::size_t rep);

/// One replication: generate the model, sample data, run the chain, score it.
RepResult run_replication(const Scenario& s, std::size_t index, std::size_t rep, const BenchOptions& opts);

/// Every replication of every scenario. A failing replication is recorded
/// and the run continues. Throws ConfigError for reps == 0.
BenchReport run_benchmark(const std::vector<Scenario>& scenarios, const BenchOptions& opts);

}  // namespace bdg
