#pragma once

// Shared fixtures for the test suites: random graphs and a dense oracle that
// does not go through the library's eigen-solver path.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kcent/graph.hpp"

namespace kt {

using kcent::Edge;
using kcent::EdgeId;
using kcent::Vertex;
using kcent::WeightedGraph;

/// Random connected graph: a random recursive tree plus `extra` distinct
/// chords, weights uniform in [lo, hi].
inline WeightedGraph random_graph(std::mt19937_64& rng, Vertex n, int extra, double lo = 1.0, double hi = 10.0) {
  std::uniform_real_distribution<double> weight(lo, hi);
  std::set<std::pair<Vertex, Vertex>> seen;
  std::vector<Edge> edges;
  for (Vertex v = 1; v < n; ++v) {
    const Vertex u = std::uniform_int_distribution<Vertex>(0, v - 1)(rng);
    seen.emplace(u, v);
    edges.push_back(Edge{u, v, weight(rng)});
  }
  const long long max_extra = static_cast<long long>(n) * (n - 1) / 2 - (n - 1);
  extra = static_cast<int>(std::min<long long>(extra, max_extra));
  std::uniform_int_distribution<Vertex> pick(0, n - 1);
  while (extra > 0) {
    Vertex a = pick(rng);
    Vertex b = pick(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!seen.emplace(a, b).second) continue;
    edges.push_back(Edge{a, b, weight(rng)});
    --extra;
  }
  return kcent::build_graph(edges, n);
}

inline WeightedGraph from_list(std::initializer_list<Edge> edges) {
  return kcent::build_graph(std::vector<Edge>(edges));
}

inline WeightedGraph k2() { return from_list({{0, 1, 1.0}}); }
inline WeightedGraph p3() { return from_list({{0, 1, 1.0}, {1, 2, 1.0}}); }
inline WeightedGraph triangle() { return from_list({{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}); }
inline WeightedGraph star3() { return from_list({{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}}); }

inline Eigen::MatrixXd dense_laplacian(const WeightedGraph& g) {
  const Vertex n = g.num_vertices();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    L(e.u, e.u) += e.weight;
    L(e.v, e.v) += e.weight;
    L(e.u, e.v) -= e.weight;
    L(e.v, e.u) -= e.weight;
  }
  return L;
}

/// L^+ = (L + J/n)^-1 - J/n for a connected graph.
inline Eigen::MatrixXd oracle_pinv(const Eigen::MatrixXd& L) {
  const auto n = L.rows();
  const Eigen::MatrixXd J = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  return Eigen::MatrixXd((L + J).partialPivLu().inverse()) - J;
}

inline Eigen::MatrixXd oracle_pinv(const WeightedGraph& g) { return oracle_pinv(dense_laplacian(g)); }

inline double oracle_kirchhoff(const WeightedGraph& g) {
  return static_cast<double>(g.num_vertices()) * oracle_pinv(g).trace();
}

inline double oracle_edge_centrality(const WeightedGraph& g, EdgeId e, double theta) {
  Eigen::MatrixXd L = dense_laplacian(g);
  const Edge& ed = g.edge(e);
  const double d = (1.0 - theta) * ed.weight;
  L(ed.u, ed.u) -= d;
  L(ed.v, ed.v) -= d;
  L(ed.u, ed.v) += d;
  L(ed.v, ed.u) += d;
  return static_cast<double>(g.num_vertices()) * oracle_pinv(L).trace();
}

inline double oracle_vertex_delta(const WeightedGraph& g, Vertex v, double theta) {
  Eigen::MatrixXd L = dense_laplacian(g);
  for (EdgeId e : g.incident(v)) {
    const Edge& ed = g.edge(e);
    const double d = (1.0 - theta) * ed.weight;
    L(ed.u, ed.u) -= d;
    L(ed.v, ed.v) -= d;
    L(ed.u, ed.v) += d;
    L(ed.v, ed.u) += d;
  }
  return static_cast<double>(g.num_vertices()) * oracle_pinv(L).trace() - oracle_kirchhoff(g);
}

inline bool within(double estimate, double truth, double eps) {
  return estimate >= std::exp(-eps) * truth && estimate <= std::exp(eps) * truth;
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

/// Smallest and largest generalized eigenvalues of (A, B) on the complement
/// of the constants, both PSD with kernel span(1).
inline std::pair<double, double> relative_spectrum(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const auto n = A.rows();
  // Orthonormal basis of 1-perp.
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
  Q.col(0).setOnes();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Q);
  const Eigen::MatrixXd basis = Eigen::MatrixXd(qr.householderQ()).rightCols(n - 1);
  const Eigen::MatrixXd a = basis.transpose() * A * basis;
  const Eigen::MatrixXd b = basis.transpose() * B * basis;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

}  // namespace kt
