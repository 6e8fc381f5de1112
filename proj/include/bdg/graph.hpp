#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bdg/errors.hpp"

namespace bdg {

/// Candidate edge (i, j) with 0 <= i < j. The ordering is part of the
/// identity: the second node plays the special role in rate computations.
struct Edge {
  int i = 0;
  int j = 1;

  /// Throws InvalidEdge unless 0 <= i < j.
  static Edge make(int i, int j);

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Number of candidate edges p(p-1)/2.
constexpr std::size_t candidate_count(int p) {
  return p < 2 ? 0 : static_cast<std::size_t>(p) * static_cast<std::size_t>(p - 1) / 2;
}

/// Position of e in the row-major enumeration (0,1), (0,2), ..., (p-2,p-1).
std::size_t edge_index(int p, Edge e);
Edge edge_at(int p, std::size_t index);

enum class Move { Birth, Death };

/// Immutable undirected graph on p labeled nodes.
class Graph {
 public:
  Graph() = default;
  /// Throws InvalidDimension for p < 1 and InvalidEdge for bad or repeated edges.
  explicit Graph(int p, std::vector<Edge> edges = {});

  static Graph empty(int p) { return Graph(p); }
  static Graph complete(int p);

  int p() const noexcept { return p_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  bool contains(Edge e) const;
  bool adjacent(int a, int b) const;

  /// Canonical `p;i-j,i-j,...` text with edges in ascending order.
  std::string canonical() const;
  static Graph parse(std::string_view text);

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.p_ == b.p_ && a.edges_ == b.edges_;
  }

 private:
  int p_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint8_t> adj_;  // p*p
};

/// Sorted neighbor set of node i.
std::vector<int> neighbors(const Graph& g, int i);

/// G with e added if absent, removed if present.
Graph toggle_edge(const Graph& g, Edge e);

struct UniformPrior {};

/// p(G) proportional to gamma^|E| / |E|!.
struct TruncatedPoissonPrior {
  double gamma = 1.0;
};

using GraphPrior = std::variant<UniformPrior, TruncatedPoissonPrior>;

/// Throws DomainError for a non-finite or non-positive gamma.
void validate(const GraphPrior& prior);

/// log P(G') / P(G) where G' is g after the move on e. Throws InvalidMove
/// when a death targets an absent edge or a birth a present one.
double log_prior_ratio(const GraphPrior& prior, const Graph& g, Edge e, Move move);

std::string to_string(const GraphPrior& prior);

}  // namespace bdg
