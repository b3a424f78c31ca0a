#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kcent/cholesky.hpp"
#include "kcent/graph.hpp"

namespace kcent {

/// Deactivation operator P = I - (1-theta) W^1/2 B S^+ B^T W^1/2 for an edge
/// block against a Laplacian on its support (indexed by position in
/// block.support()). S^+ is applied through a complete factorization of S at
/// accuracy epsilon_factor (0 = exact).
Eigen::MatrixXd deactivation_operator(const IncidenceBlock& block, const Laplacian& schur, double theta,
                                      double epsilon_factor, std::mt19937_64& rng,
                                      const EliminationOptions& options = {});

/// Dense matrix Z with b^T Z b within exp(+-epsilon) of
/// b^T (I - (1-theta) W^1/2 B L^+ B^T W^1/2)^-1 b, given a Schur complement
/// `schur` of L onto the support accurate to epsilon * theta / 9.
Eigen::MatrixXd deactivation_inverse(const IncidenceBlock& block, const Laplacian& schur, double theta,
                                     double epsilon, std::mt19937_64& rng, const EliminationOptions& options = {});

/// The value b^T Z b for a single b, computed through the Chebyshev iteration.
double quad_solve(const IncidenceBlock& block, const Eigen::VectorXd& b, double theta, double epsilon,
                  const Laplacian& schur, std::uint64_t seed = 0, const EliminationOptions& options = {});

/// Per-vertex forms z^T B_v^T W^1/2 (I - (1-theta) W^1/2 B_v L^+ B_v^T W^1/2)^-1 W^1/2 B_v z
/// where B_v holds the edges incident to v. Schur complements onto each
/// vertex's closed neighbourhood come from a volume-balanced recursion that
/// spends epsilon_schur in total; each per-vertex inverse is accurate to
/// epsilon. The operators do not depend on z and are built once.
class VertexQuadOperator {
 public:
  VertexQuadOperator(const WeightedGraph& g, const Laplacian& S, std::span<const Vertex> query, double theta,
                     double epsilon_schur, double epsilon, std::uint64_t seed = 0,
                     const EliminationOptions& options = {});

  /// Query vertices ascending; rows of evaluate() follow this order.
  const std::vector<Vertex>& vertices() const { return vertices_; }
  std::size_t schur_levels() const { return levels_; }

  /// z: n x k. Returns |V^Q| x k.
  Eigen::MatrixXd evaluate(const RowBlock& z) const;
  std::map<Vertex, double> evaluate(const Eigen::VectorXd& z) const;

 private:
  struct Local {
    std::vector<Edge> edges;  // incident edges, ascending id
    Eigen::MatrixXd inverse;
  };

  Eigen::Index dimension_ = 0;
  std::vector<Vertex> vertices_;
  std::vector<Local> local_;
  std::size_t levels_ = 0;
};

std::map<Vertex, double> quad_approx(const WeightedGraph& g, const Laplacian& S, std::span<const Vertex> query,
                                     const Eigen::VectorXd& z, double theta, double epsilon_schur, double epsilon,
                                     std::uint64_t seed = 0, const EliminationOptions& options = {});

}  // namespace kcent
