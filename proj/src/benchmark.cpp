#include "bdg/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <thread>

#include "bdg/estimators.hpp"

namespace bdg {

namespace {

struct KindName {
  ModelKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {ModelKind::Circle, "circle"}, {ModelKind::Star, "star"},       {ModelKind::AR1, "ar1"},
    {ModelKind::AR2, "ar2"},       {ModelKind::Random, "random"},   {ModelKind::Cluster, "cluster"},
    {ModelKind::ScaleFree, "scale-free"},
};

SymMatrixd banded(int p, const std::vector<double>& band) {
  MatrixXd k = MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    k(i, i) = band[0];
    for (std::size_t d = 1; d < band.size(); ++d)
      if (i + static_cast<int>(d) < p) k(i, i + d) = k(i + d, i) = band[d];
  }
  return SymMatrixd(k);
}

Graph pattern_of(const MatrixXd& k) {
  const int p = static_cast<int>(k.rows());
  std::vector<Edge> edges;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (k(i, j) != 0.0) edges.push_back({i, j});
  return Graph(p, std::move(edges));
}

TrueModel finish(Graph g, SymMatrixd k) {
  PrecisionMatrix checked(k, g);
  return TrueModel{std::move(g), k, inverse_pd(k)};
}

TrueModel with_gwishart(Graph g, Rng& rng) {
  const int p = g.p();
  const PrecisionMatrix k = sample_gwishart_direct(g, GWishartParams{3.0, SymMatrixd::identity(p)}, rng);
  return TrueModel{std::move(g), k.k(), inverse_pd(k.k())};
}

std::vector<Edge> bernoulli_edges(const std::vector<int>& nodes, Rng& rng) {
  std::vector<Edge> edges;
  const auto q = nodes.size();
  if (q < 2) return edges;
  const double prob = 2.0 / static_cast<double>(q - 1);
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = a + 1; b < q; ++b)
      if (uniform_open(rng) < prob) edges.push_back({nodes[a], nodes[b]});
  return edges;
}

MetricStats stats(const std::vector<double>& v) {
  MetricStats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace

std::string to_string(ModelKind kind) {
  for (const auto& kn : kKindNames)
    if (kn.kind == kind) return kn.name;
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  std::string lower;
  for (char c : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "scalefree" || lower == "scale_free") lower = "scale-free";
  for (const auto& kn : kKindNames)
    if (lower == kn.name) return kn.kind;
  std::string valid;
  for (const auto& kn : kKindNames) valid += (valid.empty() ? "" : ", ") + std::string(kn.name);
  throw ConfigError("unknown model '" + name + "'; valid kinds: " + valid);
}

const std::vector<ModelKind>& all_model_kinds() {
  static const std::vector<ModelKind> kinds = [] {
    std::vector<ModelKind> v;
    for (const auto& kn : kKindNames) v.push_back(kn.kind);
    return v;
  }();
  return kinds;
}

TrueModel generate_model(const SyntheticModel& m) {
  const int p = m.p;
  const auto need = [&](int min_p) {
    if (p < min_p)
      throw InvalidDimension(to_string(m.kind) + " model needs p >= " + std::to_string(min_p) + ", got " +
                             std::to_string(p));
  };
  Rng rng = make_stream(m.seed, 1);
  switch (m.kind) {
    case ModelKind::Circle: {
      need(3);
      SymMatrixd k = banded(p, {1.0, 0.5});
      k.set(0, p - 1, 0.4);
      return finish(pattern_of(k.matrix()), k);
    }
    case ModelKind::Star: {
      need(2);
      SymMatrixd k = SymMatrixd::identity(p);
      for (int i = 1; i < p; ++i) k.set(0, i, 0.1);
      if (!is_positive_definite(k)) throw InvalidDimension("star model is not positive definite for p > 100");
      return finish(pattern_of(k.matrix()), k);
    }
    case ModelKind::AR1: {
      need(2);
      MatrixXd sigma(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) sigma(i, j) = std::pow(0.7, std::abs(i - j));
      MatrixXd k = inverse_pd(sigma);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
          if (i != j && std::abs(k(i, j)) < 1e-8) k(i, j) = 0.0;
      SymMatrixd ks(k);
      Graph g = pattern_of(ks.matrix());
      PrecisionMatrix checked(ks, g);
      return TrueModel{std::move(g), ks, SymMatrixd(sigma)};
    }
    case ModelKind::AR2: {
      need(3);
      const SymMatrixd k = banded(p, {1.0, 0.5, 0.25});
      return finish(pattern_of(k.matrix()), k);
    }
    case ModelKind::Random: {
      need(2);
      std::vector<int> nodes(static_cast<std::size_t>(p));
      for (int i = 0; i < p; ++i) nodes[static_cast<std::size_t>(i)] = i;
      return with_gwishart(Graph(p, bernoulli_edges(nodes, rng)), rng);
    }
    case ModelKind::Cluster: {
      const int blocks = std::max(2, p / 20);
      need(2 * blocks);
      std::vector<Edge> edges;
      int start = 0;
      for (int b = 0; b < blocks; ++b) {
        const int size = p / blocks + (b < p % blocks ? 1 : 0);
        std::vector<int> nodes;
        for (int i = 0; i < size; ++i) nodes.push_back(start + i);
        for (const Edge e : bernoulli_edges(nodes, rng)) edges.push_back(e);
        start += size;
      }
      return with_gwishart(Graph(p, std::move(edges)), rng);
    }
    case ModelKind::ScaleFree: {
      need(2);
      std::vector<Edge> edges{{0, 1}};
      std::vector<int> degree(static_cast<std::size_t>(p), 0);
      degree[0] = degree[1] = 1;
      for (int v = 2; v < p; ++v) {
        // Attach to u with probability degree(u) / sum of degrees.
        const double total = 2.0 * static_cast<double>(edges.size());
        double u = uniform_open(rng) * total;
        int target = v - 1;
        for (int w = 0; w < v; ++w) {
          u -= degree[static_cast<std::size_t>(w)];
          if (u < 0.0) {
            target = w;
            break;
          }
        }
        edges.push_back({target, v});
        ++degree[static_cast<std::size_t>(target)];
        ++degree[static_cast<std::size_t>(v)];
      }
      return with_gwishart(Graph(p, std::move(edges)), rng);
    }
  }
  throw InvalidArgument("unhandled model kind");
}

MvnSample sample_mvn(const SymMatrixd& sigma, std::size_t n, Rng& rng) {
  const Index p = sigma.size();
  const MatrixXd l = cholesky(sigma).lower();
  MatrixXd z(static_cast<Index>(n), p);
  for (Index r = 0; r < z.rows(); ++r)
    for (Index c = 0; c < p; ++c) z(r, c) = standard_normal(rng);
  MvnSample out;
  out.x = z * l.transpose();
  out.s = SymMatrixd(out.x.transpose() * out.x);
  return out;
}

MvnSample sample_mvn_precision(const SymMatrixd& k, std::size_t n, Rng& rng) {
  const Index p = k.size();
  const MatrixXd l = cholesky(k).lower();
  MatrixXd z(p, static_cast<Index>(n));
  for (Index c = 0; c < z.cols(); ++c)
    for (Index r = 0; r < p; ++r) z(r, c) = standard_normal(rng);
  // Columns of L^{-T} z have covariance (L L^T)^{-1}.
  MvnSample out;
  out.x = l.transpose().triangularView<Eigen::Upper>().solve(z).transpose();
  out.s = SymMatrixd(out.x.transpose() * out.x);
  return out;
}

double calibration_error(const MatrixXd& phat, const Graph& truth) {
  if (phat.rows() != truth.p() || phat.cols() != truth.p())
    throw InvalidDimension("calibration_error: phat and graph sizes differ");
  double ce = 0.0;
  for (int i = 0; i < truth.p(); ++i)
    for (int j = i + 1; j < truth.p(); ++j) ce += std::abs(phat(i, j) - (truth.adjacent(i, j) ? 1.0 : 0.0));
  return ce;
}

double f1_score(const Graph& estimate, const Graph& truth) {
  if (estimate.p() != truth.p()) throw InvalidDimension("f1_score: graph sizes differ");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (int i = 0; i < truth.p(); ++i)
    for (int j = i + 1; j < truth.p(); ++j) {
      const bool e = estimate.adjacent(i, j), t = truth.adjacent(i, j);
      tp += e && t;
      fp += e && !t;
      fn += !e && t;
    }
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

Graph threshold_graph(const MatrixXd& phat, double threshold) {
  const int p = static_cast<int>(phat.rows());
  std::vector<Edge> edges;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (phat(i, j) > threshold) edges.push_back({i, j});
  return Graph(p, std::move(edges));
}

double kl_divergence(const SymMatrixd& k_true, const SymMatrixd& k_hat) {
  if (k_true.size() != k_hat.size()) throw InvalidDimension("kl_divergence: sizes differ");
  const auto lt = cholesky(k_true);
  const auto lh = cholesky(k_hat);
  const double tr = lt.solve(k_hat.matrix()).trace();
  const double p = static_cast<double>(k_true.size());
  return 0.5 * (tr - p - (lh.logdet() - lt.logdet()));
}

bool BenchReport::partial() const {
  return std::any_of(reps.begin(), reps.end(), [](const RepResult& r) { return !r.ok; });
}

std::uint64_t replication_seed(std::uint64_t master, std::size_t index, std::size_t rep) {
  return splitmix64(splitmix64(splitmix64(master) ^ (index + 1)) ^ (rep + 1));
}

RepResult run_replication(const Scenario& s, std::size_t index, std::size_t rep, const BenchOptions& opts) {
  RepResult r;
  r.scenario = index;
  r.rep = rep;
  r.seed = replication_seed(opts.seed, index, rep);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const TrueModel truth = generate_model(SyntheticModel{s.kind, s.p, r.seed});
    Rng data_rng = make_stream(r.seed, 2);
    const MvnSample data = sample_mvn(truth.sigma, s.n, data_rng);

    ChainConfig cfg;
    cfg.iterations = s.iterations;
    cfg.burn_in = s.burn_in;
    cfg.gw_prior = GWishartParams{3.0, SymMatrixd::identity(s.p)};
    cfg.data_scatter = data.s;
    cfg.n = static_cast<double>(s.n);
    cfg.seed = splitmix64(r.seed ^ 3);
    cfg.exchange_mode = opts.exchange_mode;
    cfg.rate_form = opts.rate_form;
    const ChainTrace trace = run_chain(cfg);

    const MatrixXd phat = edge_inclusion_probs(trace);
    r.f1 = f1_score(threshold_graph(phat, opts.threshold), truth.graph);
    r.ce = calibration_error(phat, truth.graph);
    r.kl = kl_divergence(truth.k, posterior_mean_precision(trace));
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

BenchReport run_benchmark(const std::vector<Scenario>& scenarios, const BenchOptions& opts) {
  for (const auto& s : scenarios)
    if (s.reps == 0) throw ConfigError("scenario " + to_string(s.kind) + " has reps = 0");

  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t i = 0; i < scenarios.size(); ++i)
    for (std::size_t r = 0; r < scenarios[i].reps; ++r) jobs.emplace_back(i, r);

  BenchReport report;
  report.reps.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const auto [i, r] = jobs[j];
      report.reps[j] = run_replication(scenarios[i], i, r, opts);
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(jobs.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    ScenarioSummary sum;
    sum.scenario = scenarios[i];
    std::vector<double> f1, ce, kl, secs;
    for (const auto& r : report.reps) {
      if (r.scenario != i) continue;
      if (!r.ok) {
        ++sum.failed;
        continue;
      }
      ++sum.succeeded;
      f1.push_back(r.f1);
      ce.push_back(r.ce);
      kl.push_back(r.kl);
      secs.push_back(r.seconds);
    }
    sum.f1 = stats(f1);
    sum.ce = stats(ce);
    sum.kl = stats(kl);
    sum.seconds = stats(secs);
    report.summaries.push_back(sum);
  }
  return report;
}

}  // namespace bdg
