#pragma once

// Rao-Blackwellized summaries of a weighted chain trace. Each state counts
// in proportion to its waiting time; burn-in steps are left out unless a
// function says otherwise.

#include <string>
#include <vector>

#include "bdg/bdmcmc.hpp"
#include "bdg/graph.hpp"
#include "bdg/matrix_kernel.hpp"

namespace bdg {

struct GraphProbability {
  Graph graph;
  double probability = 0.0;
};

struct PosteriorSummary {
  MatrixXd phat;  // symmetric, zero diagonal
  SymMatrixd khat;
  std::vector<GraphProbability> graph_probs;  // descending probability
  Graph map_graph;
};

/// p_e = sum_t I(e in G_t) w_t / sum_t w_t over post-burn-in steps.
/// Throws EmptyTrace when no weight is left after burn-in.
MatrixXd edge_inclusion_probs(const ChainTrace& trace);

/// Weight share of every visited graph, sorted by descending probability and
/// then by canonical string. Throws EmptyTrace.
std::vector<GraphProbability> graph_posterior(const ChainTrace& trace);

/// Highest-probability graph; ties go to the smallest canonical string.
Graph map_graph(const ChainTrace& trace);

/// Weighted mean of the K snapshots (weights of the snapshot steps).
/// Throws NoSnapshots.
SymMatrixd posterior_mean_precision(const ChainTrace& trace);

/// Running p_e after every step. With include_burn_in the series starts at
/// step 0 and has steps().size() entries; otherwise it starts after burn-in.
std::vector<double> cumulative_occupancy(const ChainTrace& trace, Edge e, bool include_burn_in = true);

/// All of the above. khat is left empty when the trace has no snapshots.
PosteriorSummary summarize(const ChainTrace& trace);

}  // namespace bdg
