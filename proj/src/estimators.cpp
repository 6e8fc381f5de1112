#include "bdg/estimators.hpp"

#include <algorithm>

namespace bdg {

namespace {

double checked_total(const ChainTrace& trace) {
  const double total = trace.total_weight();
  if (trace.counted_steps() == 0 || !(total > 0.0))
    throw EmptyTrace("trace has no weight after burn-in");
  return total;
}

}  // namespace

MatrixXd edge_inclusion_probs(const ChainTrace& trace) {
  const double total = checked_total(trace);
  const int p = trace.p();
  MatrixXd phat = MatrixXd::Zero(p, p);
  // Summed per graph, then per edge: the same fixed order every time.
  for (std::size_t id = 0; id < trace.graphs().size(); ++id) {
    const double w = trace.totals()[id];
    if (w == 0.0) continue;
    for (const Edge e : trace.graphs()[id].edges()) phat(e.i, e.j) += w;
  }
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      const double v = std::min(1.0, phat(i, j) / total);
      phat(i, j) = phat(j, i) = v;
    }
  return phat;
}

std::vector<GraphProbability> graph_posterior(const ChainTrace& trace) {
  const double total = checked_total(trace);
  std::vector<std::pair<std::string, GraphProbability>> rows;
  for (std::size_t id = 0; id < trace.graphs().size(); ++id) {
    const double w = trace.totals()[id];
    if (w == 0.0) continue;
    rows.push_back({trace.graphs()[id].canonical(), {trace.graphs()[id], w / total}});
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second.probability != b.second.probability) return a.second.probability > b.second.probability;
    return a.first < b.first;
  });
  std::vector<GraphProbability> out;
  out.reserve(rows.size());
  for (auto& r : rows) out.push_back(std::move(r.second));
  return out;
}

Graph map_graph(const ChainTrace& trace) { return graph_posterior(trace).front().graph; }

SymMatrixd posterior_mean_precision(const ChainTrace& trace) {
  if (trace.snapshots().empty()) throw NoSnapshots("trace holds no K snapshots");
  const int p = trace.p();
  MatrixXd sum = MatrixXd::Zero(p, p);
  double wsum = 0.0;
  for (const auto& s : trace.snapshots()) {
    const double w = trace.steps()[s.step].weight;
    sum += w * s.k;
    wsum += w;
  }
  return SymMatrixd(sum / wsum);
}

std::vector<double> cumulative_occupancy(const ChainTrace& trace, Edge e, bool include_burn_in) {
  if (e.i < 0 || e.j <= e.i || e.j >= trace.p()) throw InvalidEdge("edge out of range for trace");
  std::vector<char> has(trace.graphs().size());
  for (std::size_t id = 0; id < has.size(); ++id) has[id] = trace.graphs()[id].contains(e);

  const std::size_t start = include_burn_in ? 0 : std::min(trace.burn_in(), trace.steps().size());
  std::vector<double> out;
  out.reserve(trace.steps().size() - start);
  double in = 0.0, all = 0.0;
  for (std::size_t t = start; t < trace.steps().size(); ++t) {
    const auto& s = trace.steps()[t];
    all += s.weight;
    if (has[s.graph_id]) in += s.weight;
    out.push_back(in / all);
  }
  return out;
}

PosteriorSummary summarize(const ChainTrace& trace) {
  PosteriorSummary s;
  s.phat = edge_inclusion_probs(trace);
  if (!trace.snapshots().empty()) s.khat = posterior_mean_precision(trace);
  s.graph_probs = graph_posterior(trace);
  s.map_graph = s.graph_probs.front().graph;
  return s;
}

}  // namespace bdg
