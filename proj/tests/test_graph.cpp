#include <doctest.h>

#include <cmath>

#include "bdg/graph.hpp"
#include "bdg/rng.hpp"
#include "support/fixtures.hpp"

using namespace bdg;

TEST_CASE("edges keep the i<j ordering") {
  CHECK_THROWS_AS(Edge::make(2, 1), InvalidEdge);
  CHECK_THROWS_AS(Edge::make(1, 1), InvalidEdge);
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), InvalidEdge);
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {0, 1}}), InvalidEdge);
  CHECK(Graph::complete(5).edge_count() == 10);
  for (std::size_t k = 0; k < candidate_count(7); ++k) CHECK(edge_index(7, edge_at(7, k)) == k);
}

TEST_CASE("canonical text round-trips") {
  const Graph g = fixture::six_node_graph();
  CHECK(g.canonical() == "6;0-1,0-5,1-2,2-3,3-4,4-5");
  CHECK(Graph::parse(g.canonical()) == g);
  CHECK(Graph::parse("4;").edge_count() == 0);
  CHECK_THROWS(Graph::parse("4;1-0"));
  CHECK_THROWS(Graph::parse("x;0-1"));
}

TEST_CASE("neighbors examples") {
  CHECK(neighbors(Graph::empty(4), 2).empty());
  CHECK(neighbors(fixture::six_node_graph(), 1) == std::vector<int>{0, 2});
  const Graph star(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  CHECK(neighbors(star, 0) == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("toggle_edge examples") {
  const Graph one = toggle_edge(Graph::empty(3), {0, 1});
  CHECK(one.canonical() == "3;0-1");
  CHECK(toggle_edge(one, {0, 1}) == Graph::empty(3));
  const Graph path = toggle_edge(fixture::six_node_graph(), {0, 5});
  CHECK(path.canonical() == "6;0-1,1-2,2-3,3-4,4-5");
  CHECK(fixture::six_node_graph().contains({0, 5}));
}

TEST_CASE("log_prior_ratio examples") {
  const Graph g4(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  CHECK(log_prior_ratio(UniformPrior{}, g4, {0, 1}, Move::Death) == 0.0);
  CHECK(log_prior_ratio(UniformPrior{}, g4, {0, 5}, Move::Birth) == 0.0);
  const TruncatedPoissonPrior pois{2.0};
  CHECK(log_prior_ratio(pois, g4, {0, 1}, Move::Death) == doctest::Approx(std::log(2.0)));
  CHECK(log_prior_ratio(pois, g4, {0, 5}, Move::Birth) == doctest::Approx(std::log(2.0 / 5.0)));
  CHECK_THROWS_AS(log_prior_ratio(pois, g4, {0, 5}, Move::Death), InvalidMove);
  CHECK_THROWS_AS(log_prior_ratio(pois, g4, {0, 1}, Move::Birth), InvalidMove);
  CHECK_THROWS_AS(validate(TruncatedPoissonPrior{0.0}), DomainError);
}

TEST_CASE("property: toggle involution, symmetric neighbors, prior antisymmetry") {
  Rng rng = make_stream(21);
  const std::vector<GraphPrior> priors = {UniformPrior{}, TruncatedPoissonPrior{0.7}, TruncatedPoissonPrior{3.0}};
  for (int rep = 0; rep < 200; ++rep) {
    const int p = 2 + rep % 8;
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < candidate_count(p); ++k)
      if (uniform_open(rng) < 0.4) edges.push_back(edge_at(p, k));
    const Graph g(p, edges);
    for (std::size_t k = 0; k < candidate_count(p); ++k) {
      const Edge e = edge_at(p, k);
      CHECK(toggle_edge(toggle_edge(g, e), e) == g);
    }
    for (int a = 0; a < p; ++a)
      for (int b : neighbors(g, a)) {
        const auto nb = neighbors(g, b);
        CHECK(std::find(nb.begin(), nb.end(), a) != nb.end());
      }
    for (const auto& prior : priors)
      for (std::size_t k = 0; k < candidate_count(p); ++k) {
        const Edge e = edge_at(p, k);
        if (g.contains(e)) continue;
        const double birth = log_prior_ratio(prior, g, e, Move::Birth);
        const double death = log_prior_ratio(prior, toggle_edge(g, e), e, Move::Death);
        CHECK(birth + death == 0.0);
      }
  }
}
