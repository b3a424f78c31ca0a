#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kcent/cholesky.hpp"
#include "kcent/graph.hpp"

namespace kcent {

/// A query edge of the recursion: endpoints are indices into the Laplacian
/// being factored, weight is the original conductance that gets deactivated.
struct QueryEdge {
  EdgeId id = 0;
  Vertex u = 0;
  Vertex v = 0;
  double weight = 1.0;
};

/// Query set covering the whole edge list of g (or the listed ids).
std::vector<QueryEdge> query_edges(const WeightedGraph& g);
std::vector<QueryEdge> query_edges(const WeightedGraph& g, std::span<const EdgeId> ids);

struct QuadNode;

/// Factorization tree computing n_e = z^T (L minus (1-theta) w_e b_e b_e^T)^+ z
/// for every query edge at once. Edges are split into ascending-id halves; each
/// half eliminates everything outside its endpoints and recurses on the Schur
/// complement. epsilon == 0 factors exactly, otherwise each level spends
/// epsilon / max(1, log2 |E^Q|) on an approximate factorization of L minus the
/// half's own edges and passes the rest of the budget down.
///
/// The tree depends only on (L, E^Q, theta, epsilon, seed), so one tree serves
/// any number of probe vectors.
class QuadRecursion {
 public:
  QuadRecursion(const Laplacian& L, std::vector<QueryEdge> query, double theta, double epsilon,
                std::uint64_t seed = 0, const EliminationOptions& options = {});
  ~QuadRecursion();
  QuadRecursion(QuadRecursion&&) noexcept;
  QuadRecursion& operator=(QuadRecursion&&) noexcept;

  /// Query edges sorted by id; rows of evaluate() follow this order.
  const std::vector<QueryEdge>& query() const { return query_; }
  Eigen::Index dimension() const { return dimension_; }
  double theta() const { return theta_; }
  double epsilon() const { return epsilon_; }
  bool exact() const { return exact_; }
  std::size_t depth() const;
  std::size_t factor_nonzeros() const;

  /// probes: dimension x k. Returns |E^Q| x k with n_e for every probe column.
  /// Columns are projected orthogonal to the constants first.
  Eigen::MatrixXd evaluate(const RowBlock& probes) const;
  std::map<EdgeId, double> evaluate(const Eigen::VectorXd& z) const;

 private:
  std::vector<QueryEdge> query_;
  Eigen::Index dimension_ = 0;
  double theta_ = 0.0;
  double epsilon_ = 0.0;
  bool exact_ = true;
  std::unique_ptr<QuadNode> root_;
};

/// Exact per-edge quadratic forms z^T (L with e theta-deleted)^+ z.
std::map<EdgeId, double> exact_quad(const Laplacian& L, std::span<const QueryEdge> query, const Eigen::VectorXd& z,
                                    double theta);

/// Randomized counterpart with every value within exp(+-epsilon) w.h.p.
std::map<EdgeId, double> quad_est(const Laplacian& L, std::span<const QueryEdge> query, const Eigen::VectorXd& z,
                                  double theta, double epsilon, std::uint64_t seed = 0,
                                  const EliminationOptions& options = {});

}  // namespace kcent
