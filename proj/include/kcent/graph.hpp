#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace kcent {

using Vertex = std::int32_t;
using EdgeId = std::int32_t;

/// Undirected weighted edge. Stored with u < v once inside a graph.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Connected-or-not undirected graph with positive weights and a per-vertex
/// incidence index. Immutable after construction.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  Vertex num_vertices() const { return n_; }
  EdgeId num_edges() const { return static_cast<EdgeId>(edges_.size()); }

  const Edge& edge(EdgeId e) const { return edges_.at(static_cast<std::size_t>(e)); }
  std::span<const Edge> edges() const { return edges_; }

  /// Edge ids incident to `v`, ascending.
  std::span<const EdgeId> incident(Vertex v) const;
  /// Number of incident edges (not the weighted degree).
  EdgeId degree(Vertex v) const { return static_cast<EdgeId>(incident(v).size()); }
  double weighted_degree(Vertex v) const;
  /// Neighbours of `v`, ascending.
  std::vector<Vertex> neighbors(Vertex v) const;

  std::optional<EdgeId> find_edge(Vertex a, Vertex b) const;

  double min_weight() const;
  double max_weight() const;

  /// Same topology with every weight multiplied by `factor` (> 0).
  WeightedGraph scaled(double factor) const;

 private:
  friend WeightedGraph build_graph(std::span<const Edge>, std::optional<Vertex>);

  Vertex n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;  // CSR over incident edge ids
  std::vector<EdgeId> incidence_;
};

/// Validates and indexes an edge list. Parallel edges collapse into one edge
/// whose weight is the sum (conductances add); ids follow first appearance.
/// `n` defaults to 1 + the largest vertex id.
WeightedGraph build_graph(std::span<const Edge> edges, std::optional<Vertex> n = std::nullopt);

bool check_connected(const WeightedGraph& g);
void require_connected(const WeightedGraph& g);

/// Copy of `g` with each listed edge's weight scaled by theta.
WeightedGraph theta_delete(const WeightedGraph& g, std::span<const EdgeId> edges, double theta);

void require_theta(double theta);
void require_epsilon(double epsilon);

/// Sparse symmetric Laplacian in compressed row layout.
class Laplacian {
 public:
  using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

  Laplacian() = default;
  explicit Laplacian(Matrix m) : matrix_(std::move(m)) {}

  /// Sums duplicates; zero-weight edges are dropped.
  static Laplacian from_edges(Eigen::Index n, std::span<const Edge> edges);

  Eigen::Index dimension() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }

  /// Off-diagonal conductances as edges with u < v, row-major order.
  std::vector<Edge> edges() const;
  double degree(Eigen::Index v) const { return matrix_.coeff(v, v); }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return matrix_ * x; }
  double quadratic_form(const Eigen::VectorXd& x) const { return x.dot(matrix_ * x); }

  /// Largest absolute entry, used to scale tolerances.
  double scale() const;

 private:
  Matrix matrix_;
};

Laplacian laplacian(const WeightedGraph& g);

/// Signed incidence rows for an edge subset plus their weights. Rows are in
/// ascending edge-id order; the lower vertex id of each edge carries +1.
struct IncidenceBlock {
  std::vector<EdgeId> edge_ids;
  std::vector<Edge> edges;
  Eigen::SparseMatrix<double, Eigen::RowMajor, int> matrix;  // |T| x n
  Eigen::VectorXd weights;

  /// V(T): endpoints of the block, ascending.
  std::vector<Vertex> support() const;
  Eigen::Index size() const { return static_cast<Eigen::Index>(edges.size()); }
  /// B^T W B as a dense n x n matrix.
  Eigen::MatrixXd gram() const;
};

IncidenceBlock incidence_block(const WeightedGraph& g, std::span<const EdgeId> edges);

}  // namespace kcent
