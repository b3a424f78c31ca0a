#include "kcent/oracle.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>

#include "kcent/dense.hpp"
#include "kcent/error.hpp"
#include "kcent/solver.hpp"

namespace kcent {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::MatrixXd pinv_of(const WeightedGraph& g) {
  require_connected(g);
  return dense_pseudoinverse(laplacian(g)).matrix();
}

double resistance_from(const Eigen::MatrixXd& pinv, Vertex u, Vertex v) {
  return pinv(u, u) + pinv(v, v) - 2.0 * pinv(u, v);
}

}  // namespace

double effective_resistance(const WeightedGraph& g, Vertex u, Vertex v) {
  if (u == v) fail(ErrorCode::SameVertex, "effective resistance needs two distinct vertices");
  if (u < 0 || v < 0 || u >= g.num_vertices() || v >= g.num_vertices()) {
    fail(ErrorCode::InvalidArgument, "vertex out of range");
  }
  require_connected(g);
  if (g.num_vertices() <= kDefaultDenseCap) return resistance_from(pinv_of(g), u, v);

  Eigen::VectorXd b = Eigen::VectorXd::Zero(g.num_vertices());
  b(u) = 1.0;
  b(v) = -1.0;
  const Eigen::VectorXd x = LaplacianSolver(laplacian(g)).solve(b, 1e-10);
  return b.dot(x);
}

double kirchhoff_index(const WeightedGraph& g) {
  return static_cast<double>(g.num_vertices()) * pinv_of(g).trace();
}

double kirchhoff_index_pairwise(const WeightedGraph& g) {
  const Eigen::MatrixXd pinv = pinv_of(g);
  double sum = 0.0;
  for (Vertex u = 0; u < g.num_vertices(); ++u) {
    for (Vertex v = u + 1; v < g.num_vertices(); ++v) sum += resistance_from(pinv, u, v);
  }
  return sum;
}

double exact_edge_centrality(const WeightedGraph& g, EdgeId e, double theta) {
  const EdgeId ids[] = {e};
  return kirchhoff_index(theta_delete(g, ids, theta));
}

double exact_edge_centrality_delta(const WeightedGraph& g, EdgeId e, double theta) {
  return exact_edge_centrality(g, e, theta) - kirchhoff_index(g);
}

double exact_vertex_centrality_delta(const WeightedGraph& g, Vertex v, double theta) {
  const auto incident = g.incident(v);
  return kirchhoff_index(theta_delete(g, incident, theta)) - kirchhoff_index(g);
}

CentralityReport exact_edge_centralities(const WeightedGraph& g, double theta, bool delta) {
  const auto start = Clock::now();
  require_theta(theta);
  CentralityReport report;
  report.kind = CentralityKind::Edge;
  report.method = delta ? "exact-delta" : "exact";
  report.theta = theta;
  const double base = delta ? kirchhoff_index(g) : 0.0;
  report.values.reserve(static_cast<std::size_t>(g.num_edges()));
  for (EdgeId e = 0; e < g.num_edges(); ++e) report.values.push_back(exact_edge_centrality(g, e, theta) - base);
  report.wall_seconds = seconds_since(start);
  return report;
}

CentralityReport exact_vertex_centralities(const WeightedGraph& g, double theta) {
  const auto start = Clock::now();
  require_theta(theta);
  CentralityReport report;
  report.kind = CentralityKind::Vertex;
  report.method = "exact-delta";
  report.theta = theta;
  const double base = kirchhoff_index(g);
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    report.values.push_back(kirchhoff_index(theta_delete(g, g.incident(v), theta)) - base);
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

CentralityReport edge_betweenness(const WeightedGraph& g) {
  const auto start = Clock::now();
  require_connected(g);
  const auto n = static_cast<std::size_t>(g.num_vertices());
  std::vector<double> score(static_cast<std::size_t>(g.num_edges()), 0.0);

  std::vector<double> dist(n);
  std::vector<double> sigma(n);
  std::vector<double> dependency(n);
  std::vector<std::vector<std::pair<Vertex, EdgeId>>> preds(n);
  std::vector<Vertex> settled;
  std::vector<char> done(n);
  using Item = std::pair<double, Vertex>;

  for (Vertex s = 0; s < g.num_vertices(); ++s) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(dependency.begin(), dependency.end(), 0.0);
    std::fill(done.begin(), done.end(), 0);
    for (auto& p : preds) p.clear();
    settled.clear();

    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[static_cast<std::size_t>(s)] = 0.0;
    sigma[static_cast<std::size_t>(s)] = 1.0;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
      const auto [d, v] = heap.top();
      heap.pop();
      const auto vi = static_cast<std::size_t>(v);
      if (done[vi]) continue;
      done[vi] = 1;
      settled.push_back(v);
      for (EdgeId e : g.incident(v)) {
        const Edge& ed = g.edge(e);
        const Vertex u = ed.u == v ? ed.v : ed.u;
        const auto ui = static_cast<std::size_t>(u);
        if (done[ui]) continue;
        const double candidate = d + 1.0 / ed.weight;
        const double tol = 1e-12 * std::max(1.0, candidate);
        if (candidate < dist[ui] - tol) {
          dist[ui] = candidate;
          sigma[ui] = sigma[vi];
          preds[ui].assign(1, {v, e});
          heap.emplace(candidate, u);
        } else if (std::abs(candidate - dist[ui]) <= tol) {
          sigma[ui] += sigma[vi];
          preds[ui].emplace_back(v, e);
        }
      }
    }
    for (auto it = settled.rbegin(); it != settled.rend(); ++it) {
      const auto wi = static_cast<std::size_t>(*it);
      for (const auto& [v, e] : preds[wi]) {
        const auto vi = static_cast<std::size_t>(v);
        const double share = sigma[vi] / sigma[wi] * (1.0 + dependency[wi]);
        score[static_cast<std::size_t>(e)] += share;
        dependency[vi] += share;
      }
    }
  }
  for (double& x : score) x *= 0.5;  // every unordered pair was counted from both ends

  CentralityReport report;
  report.kind = CentralityKind::Edge;
  report.method = "betweenness";
  report.values = std::move(score);
  report.wall_seconds = seconds_since(start);
  return report;
}

CentralityReport spanning_edge_centrality(const WeightedGraph& g) {
  const auto start = Clock::now();
  const Eigen::MatrixXd pinv = pinv_of(g);
  CentralityReport report;
  report.kind = CentralityKind::Edge;
  report.method = "spanning";
  for (const Edge& e : g.edges()) report.values.push_back(e.weight * resistance_from(pinv, e.u, e.v));
  report.wall_seconds = seconds_since(start);
  return report;
}

CentralityReport current_flow_edge_centrality(const WeightedGraph& g) {
  const auto start = Clock::now();
  const Eigen::MatrixXd pinv = pinv_of(g);
  const Vertex n = g.num_vertices();
  CentralityReport report;
  report.kind = CentralityKind::Edge;
  report.method = "current-flow";
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  for (const Edge& e : g.edges()) {
    // potential difference across e for the unit s-t flow is (row_u - row_v)(s) - (row_u - row_v)(t)
    const Eigen::RowVectorXd diff = pinv.row(e.u) - pinv.row(e.v);
    double total = 0.0;
    for (Vertex s = 0; s < n; ++s) {
      for (Vertex t = s + 1; t < n; ++t) total += std::abs(diff(s) - diff(t));
    }
    report.values.push_back(e.weight * total / pairs);
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

double relative_std_dev(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::EmptyInput, "relative standard deviation of an empty list");
  double mean = 0.0;
  for (double x : values) mean += x;
  mean /= static_cast<double>(values.size());
  if (mean == 0.0) fail(ErrorCode::ZeroMean, "mean is zero");
  double var = 0.0;
  for (double x : values) var += (x - mean) * (x - mean);
  var /= static_cast<double>(values.size());
  return std::sqrt(var) / mean;
}

}  // namespace kcent
