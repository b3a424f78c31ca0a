#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kcent/graph.hpp"

namespace kcent {

enum class CentralityKind { Edge, Vertex };

/// Centrality values indexed by edge id (edge kind) or vertex id (vertex kind).
struct CentralityReport {
  CentralityKind kind = CentralityKind::Edge;
  std::string method;
  double theta = 0.0;
  double epsilon = 0.0;  // 0 for exact methods
  std::uint64_t seed = 0;
  std::size_t samples = 0;  // Monte-Carlo probes, 0 for exact methods
  std::vector<double> values;
  double wall_seconds = 0.0;
};

double effective_resistance(const WeightedGraph& g, Vertex u, Vertex v);

/// n tr(L^+), the sum of effective resistances over unordered vertex pairs.
double kirchhoff_index(const WeightedGraph& g);
/// The same quantity summed pair by pair; an independent cross-check.
double kirchhoff_index_pairwise(const WeightedGraph& g);

/// C_theta(e): Kirchhoff index after theta-deleting e.
double exact_edge_centrality(const WeightedGraph& g, EdgeId e, double theta);
/// C_theta^Delta(e) = C_theta(e) - Kf(G).
double exact_edge_centrality_delta(const WeightedGraph& g, EdgeId e, double theta);
/// Kirchhoff index increase after theta-deleting every edge incident to v.
double exact_vertex_centrality_delta(const WeightedGraph& g, Vertex v, double theta);

CentralityReport exact_edge_centralities(const WeightedGraph& g, double theta, bool delta);
CentralityReport exact_vertex_centralities(const WeightedGraph& g, double theta);

/// Shortest-path edge betweenness over unordered pairs. Edge length is the
/// resistance 1/w; tied shortest paths share each pair's unit equally.
CentralityReport edge_betweenness(const WeightedGraph& g);
/// w(e) R_eff(e): the marginal of e in a weighted uniform spanning tree.
CentralityReport spanning_edge_centrality(const WeightedGraph& g);
/// Mean absolute current on each edge over all unordered unit s-t flows.
CentralityReport current_flow_edge_centrality(const WeightedGraph& g);

/// Population standard deviation divided by the mean.
double relative_std_dev(std::span<const double> values);

}  // namespace kcent
