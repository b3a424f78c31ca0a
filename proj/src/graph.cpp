#include "kcent/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <string>
#include <utility>

#include "kcent/error.hpp"

namespace kcent {

std::span<const EdgeId> WeightedGraph::incident(Vertex v) const {
  if (v < 0 || v >= n_) fail(ErrorCode::InvalidArgument, "vertex " + std::to_string(v) + " out of range");
  const auto begin = offsets_[static_cast<std::size_t>(v)];
  const auto end = offsets_[static_cast<std::size_t>(v) + 1];
  return std::span<const EdgeId>(incidence_).subspan(begin, end - begin);
}

double WeightedGraph::weighted_degree(Vertex v) const {
  double sum = 0.0;
  for (EdgeId e : incident(v)) sum += edges_[static_cast<std::size_t>(e)].weight;
  return sum;
}

std::vector<Vertex> WeightedGraph::neighbors(Vertex v) const {
  std::vector<Vertex> out;
  for (EdgeId e : incident(v)) {
    const Edge& ed = edges_[static_cast<std::size_t>(e)];
    out.push_back(ed.u == v ? ed.v : ed.u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<EdgeId> WeightedGraph::find_edge(Vertex a, Vertex b) const {
  if (a < 0 || b < 0 || a >= n_ || b >= n_) return std::nullopt;
  const Vertex lo = std::min(a, b);
  const Vertex hi = std::max(a, b);
  for (EdgeId e : incident(lo)) {
    const Edge& ed = edges_[static_cast<std::size_t>(e)];
    if (ed.u == lo && ed.v == hi) return e;
  }
  return std::nullopt;
}

double WeightedGraph::min_weight() const {
  if (edges_.empty()) fail(ErrorCode::EmptyGraph, "graph has no edges");
  double w = edges_.front().weight;
  for (const Edge& e : edges_) w = std::min(w, e.weight);
  return w;
}

double WeightedGraph::max_weight() const {
  if (edges_.empty()) fail(ErrorCode::EmptyGraph, "graph has no edges");
  double w = edges_.front().weight;
  for (const Edge& e : edges_) w = std::max(w, e.weight);
  return w;
}

WeightedGraph WeightedGraph::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) fail(ErrorCode::InvalidArgument, "scale factor must be positive");
  WeightedGraph out = *this;
  for (Edge& e : out.edges_) e.weight *= factor;
  return out;
}

WeightedGraph build_graph(std::span<const Edge> edges, std::optional<Vertex> n) {
  if (edges.empty()) fail(ErrorCode::EmptyGraph, "edge list is empty");

  WeightedGraph g;
  std::map<std::pair<Vertex, Vertex>, EdgeId> seen;
  Vertex max_id = -1;
  for (const Edge& in : edges) {
    if (in.u < 0 || in.v < 0) fail(ErrorCode::InvalidArgument, "negative vertex id");
    if (in.u == in.v) fail(ErrorCode::SelfLoop, "self-loop at vertex " + std::to_string(in.u));
    if (!(in.weight > 0.0) || !std::isfinite(in.weight)) {
      fail(ErrorCode::NonPositiveWeight,
           "edge (" + std::to_string(in.u) + "," + std::to_string(in.v) + ") has weight " + std::to_string(in.weight));
    }
    const Vertex lo = std::min(in.u, in.v);
    const Vertex hi = std::max(in.u, in.v);
    max_id = std::max(max_id, hi);
    auto [it, inserted] = seen.emplace(std::make_pair(lo, hi), static_cast<EdgeId>(g.edges_.size()));
    if (inserted) {
      g.edges_.push_back(Edge{lo, hi, in.weight});
    } else {
      g.edges_[static_cast<std::size_t>(it->second)].weight += in.weight;
    }
  }

  g.n_ = n.value_or(max_id + 1);
  if (g.n_ <= max_id) fail(ErrorCode::InvalidArgument, "vertex id exceeds declared vertex count");

  std::vector<std::size_t> counts(static_cast<std::size_t>(g.n_) + 1, 0);
  for (const Edge& e : g.edges_) {
    ++counts[static_cast<std::size_t>(e.u) + 1];
    ++counts[static_cast<std::size_t>(e.v) + 1];
  }
  for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
  g.offsets_ = counts;
  g.incidence_.assign(counts.back(), 0);
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  for (EdgeId id = 0; id < g.num_edges(); ++id) {
    const Edge& e = g.edges_[static_cast<std::size_t>(id)];
    g.incidence_[cursor[static_cast<std::size_t>(e.u)]++] = id;
    g.incidence_[cursor[static_cast<std::size_t>(e.v)]++] = id;
  }
  return g;
}

bool check_connected(const WeightedGraph& g) {
  const Vertex n = g.num_vertices();
  if (n == 0) return false;
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  std::queue<Vertex> frontier;
  frontier.push(0);
  visited[0] = 1;
  Vertex reached = 1;
  while (!frontier.empty()) {
    const Vertex v = frontier.front();
    frontier.pop();
    for (EdgeId e : g.incident(v)) {
      const Edge& ed = g.edge(e);
      const Vertex u = ed.u == v ? ed.v : ed.u;
      if (!visited[static_cast<std::size_t>(u)]) {
        visited[static_cast<std::size_t>(u)] = 1;
        ++reached;
        frontier.push(u);
      }
    }
  }
  return reached == n;
}

void require_connected(const WeightedGraph& g) {
  if (!check_connected(g)) fail(ErrorCode::Disconnected, "graph is not connected");
}

void require_theta(double theta) {
  if (!(theta > 0.0 && theta <= 0.5)) fail(ErrorCode::ThetaOutOfRange, "theta must lie in (0, 1/2], got " + std::to_string(theta));
}

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 0.5)) {
    fail(ErrorCode::EpsilonOutOfRange, "epsilon must lie in (0, 1/2], got " + std::to_string(epsilon));
  }
}

WeightedGraph theta_delete(const WeightedGraph& g, std::span<const EdgeId> edges, double theta) {
  require_theta(theta);
  std::vector<Edge> list(g.edges().begin(), g.edges().end());
  std::vector<char> hit(list.size(), 0);
  for (EdgeId e : edges) {
    if (e < 0 || e >= g.num_edges()) fail(ErrorCode::UnknownEdge, "edge id " + std::to_string(e));
    // a repeated id is still a single deletion
    if (!hit[static_cast<std::size_t>(e)]) {
      hit[static_cast<std::size_t>(e)] = 1;
      list[static_cast<std::size_t>(e)].weight *= theta;
    }
  }
  return build_graph(list, g.num_vertices());
}

Laplacian Laplacian::from_edges(Eigen::Index n, std::span<const Edge> edges) {
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(edges.size() * 4);
  for (const Edge& e : edges) {
    if (e.weight == 0.0) continue;
    if (e.u == e.v) fail(ErrorCode::SelfLoop, "self-loop in Laplacian edge list");
    triplets.emplace_back(e.u, e.u, e.weight);
    triplets.emplace_back(e.v, e.v, e.weight);
    triplets.emplace_back(e.u, e.v, -e.weight);
    triplets.emplace_back(e.v, e.u, -e.weight);
  }
  Matrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return Laplacian(std::move(m));
}

std::vector<Edge> Laplacian::edges() const {
  std::vector<Edge> out;
  for (int row = 0; row < matrix_.outerSize(); ++row) {
    for (Matrix::InnerIterator it(matrix_, row); it; ++it) {
      if (it.col() > row && it.value() < 0.0) out.push_back(Edge{row, static_cast<Vertex>(it.col()), -it.value()});
    }
  }
  return out;
}

double Laplacian::scale() const {
  double s = 0.0;
  for (int row = 0; row < matrix_.outerSize(); ++row) {
    for (Matrix::InnerIterator it(matrix_, row); it; ++it) s = std::max(s, std::abs(it.value()));
  }
  return s;
}

Laplacian laplacian(const WeightedGraph& g) {
  return Laplacian::from_edges(g.num_vertices(), g.edges());
}

std::vector<Vertex> IncidenceBlock::support() const {
  std::vector<Vertex> out;
  for (const Edge& e : edges) {
    out.push_back(e.u);
    out.push_back(e.v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Eigen::MatrixXd IncidenceBlock::gram() const {
  Eigen::MatrixXd b(matrix);
  return b.transpose() * weights.asDiagonal() * b;
}

IncidenceBlock incidence_block(const WeightedGraph& g, std::span<const EdgeId> edges) {
  IncidenceBlock block;
  block.edge_ids.assign(edges.begin(), edges.end());
  for (EdgeId e : block.edge_ids) {
    if (e < 0 || e >= g.num_edges()) fail(ErrorCode::UnknownEdge, "edge id " + std::to_string(e));
  }
  std::sort(block.edge_ids.begin(), block.edge_ids.end());
  block.edge_ids.erase(std::unique(block.edge_ids.begin(), block.edge_ids.end()), block.edge_ids.end());

  const auto rows = static_cast<Eigen::Index>(block.edge_ids.size());
  std::vector<Eigen::Triplet<double, int>> triplets;
  block.weights.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Edge& e = g.edge(block.edge_ids[static_cast<std::size_t>(r)]);
    block.edges.push_back(e);
    block.weights[r] = e.weight;
    triplets.emplace_back(static_cast<int>(r), e.u, 1.0);
    triplets.emplace_back(static_cast<int>(r), e.v, -1.0);
  }
  block.matrix.resize(rows, g.num_vertices());
  block.matrix.setFromTriplets(triplets.begin(), triplets.end());
  block.matrix.makeCompressed();
  return block;
}

}  // namespace kcent
