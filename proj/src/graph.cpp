#include "bdg/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace bdg {

Edge Edge::make(int i, int j) {
  if (i < 0 || j <= i) {
    throw InvalidEdge("edge (" + std::to_string(i) + "," + std::to_string(j) +
                      ") violates 0 <= i < j");
  }
  return Edge{i, j};
}

std::size_t edge_index(int p, Edge e) {
  if (e.i < 0 || e.j <= e.i || e.j >= p) throw InvalidEdge("edge_index: edge out of range");
  const auto i = static_cast<std::size_t>(e.i);
  const auto n = static_cast<std::size_t>(p);
  return i * n - i * (i + 1) / 2 + static_cast<std::size_t>(e.j - e.i - 1);
}

Edge edge_at(int p, std::size_t index) {
  if (index >= candidate_count(p)) throw InvalidEdge("edge_at: index out of range");
  int i = 0;
  std::size_t row = static_cast<std::size_t>(p - 1);
  while (index >= row) {
    index -= row;
    ++i;
    --row;
  }
  return Edge{i, i + 1 + static_cast<int>(index)};
}

Graph::Graph(int p, std::vector<Edge> edges) : p_(p), edges_(std::move(edges)) {
  if (p < 1) throw InvalidDimension("graph needs p >= 1");
  adj_.assign(static_cast<std::size_t>(p) * static_cast<std::size_t>(p), 0);
  std::sort(edges_.begin(), edges_.end());
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const Edge e = edges_[k];
    if (e.i < 0 || e.j <= e.i || e.j >= p)
      throw InvalidEdge("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                        ") is not a valid i<j pair for p=" + std::to_string(p));
    if (k > 0 && edges_[k - 1] == e) throw InvalidEdge("duplicate edge");
    adj_[static_cast<std::size_t>(e.i * p + e.j)] = 1;
    adj_[static_cast<std::size_t>(e.j * p + e.i)] = 1;
  }
}

Graph Graph::complete(int p) {
  std::vector<Edge> edges;
  edges.reserve(candidate_count(p));
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) edges.push_back({i, j});
  return Graph(p, std::move(edges));
}

bool Graph::contains(Edge e) const {
  if (e.i < 0 || e.j <= e.i || e.j >= p_) throw InvalidEdge("contains: edge out of range");
  return adj_[static_cast<std::size_t>(e.i * p_ + e.j)] != 0;
}

bool Graph::adjacent(int a, int b) const {
  return a != b && adj_[static_cast<std::size_t>(a * p_ + b)] != 0;
}

std::string Graph::canonical() const {
  std::string out = std::to_string(p_) + ";";
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(edges_[k].i);
    out += '-';
    out += std::to_string(edges_[k].j);
  }
  return out;
}

namespace {

int parse_int(std::string_view s, std::string_view whole) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty())
    throw ParseError("bad integer '" + std::string(s) + "' in graph '" + std::string(whole) + "'");
  return v;
}

}  // namespace

Graph Graph::parse(std::string_view text) {
  const auto semi = text.find(';');
  if (semi == std::string_view::npos) throw ParseError("graph text lacks ';'");
  const int p = parse_int(text.substr(0, semi), text);
  std::vector<Edge> edges;
  std::string_view rest = text.substr(semi + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto dash = item.find('-');
    if (dash == std::string_view::npos) throw ParseError("graph edge lacks '-'");
    const int i = parse_int(item.substr(0, dash), text);
    const int j = parse_int(item.substr(dash + 1), text);
    edges.push_back(Edge::make(i, j));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return Graph(p, std::move(edges));
}

std::vector<int> neighbors(const Graph& g, int i) {
  if (i < 0 || i >= g.p()) throw InvalidArgument("neighbors: node out of range");
  std::vector<int> out;
  for (int j = 0; j < g.p(); ++j)
    if (g.adjacent(i, j)) out.push_back(j);
  return out;
}

Graph toggle_edge(const Graph& g, Edge e) {
  std::vector<Edge> edges = g.edges();
  if (g.contains(e)) {
    edges.erase(std::find(edges.begin(), edges.end(), e));
  } else {
    edges.push_back(e);
  }
  return Graph(g.p(), std::move(edges));
}

void validate(const GraphPrior& prior) {
  if (const auto* tp = std::get_if<TruncatedPoissonPrior>(&prior)) {
    if (!std::isfinite(tp->gamma) || tp->gamma <= 0.0)
      throw DomainError("truncated Poisson prior needs finite gamma > 0");
  }
}

double log_prior_ratio(const GraphPrior& prior, const Graph& g, Edge e, Move move) {
  const bool present = g.contains(e);
  if (move == Move::Death && !present) throw InvalidMove("death of an absent edge");
  if (move == Move::Birth && present) throw InvalidMove("birth of a present edge");
  if (std::holds_alternative<UniformPrior>(prior)) return 0.0;
  const double gamma = std::get<TruncatedPoissonPrior>(prior).gamma;
  const auto size = static_cast<double>(g.edge_count());
  // Differences of logs so that birth and the reverse death cancel exactly.
  return move == Move::Death ? std::log(size) - std::log(gamma) : std::log(gamma) - std::log(size + 1.0);
}

std::string to_string(const GraphPrior& prior) {
  if (std::holds_alternative<UniformPrior>(prior)) return "uniform";
  std::ostringstream os;
  os.precision(17);
  os << "poisson:" << std::get<TruncatedPoissonPrior>(prior).gamma;
  return os.str();
}

}  // namespace bdg
