#include "kcent/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "kcent/error.hpp"
#include "kcent/parallel.hpp"
#include "kcent/probes.hpp"
#include "kcent/quad.hpp"
#include "kcent/vertex_quad.hpp"

namespace kcent {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Seeds for the independent random parts of one estimator call.
enum Stream : std::uint64_t { kProbes = 1, kFactor = 2, kSketch = 3, kSolver = 4 };

std::size_t resolve_samples(double constant, Vertex n, double epsilon, const EstimatorOptions& options) {
  const std::size_t m = options.samples > 0 ? options.samples : probe_count(constant, epsilon, n);
  return std::max(m, std::max<std::size_t>(options.min_samples, 1));
}

// Graph with weights rescaled into [1, U].
struct Rescaled {
  WeightedGraph graph;
  double unit;  // original minimum weight
  double U;
};

Rescaled rescale(const WeightedGraph& g) {
  const double lo = g.min_weight();
  return Rescaled{g.scaled(1.0 / lo), lo, g.max_weight() / lo};
}

void validate(const WeightedGraph& g, double theta, double epsilon) {
  require_theta(theta);
  require_epsilon(epsilon);
  if (g.num_vertices() < 2 || g.num_edges() == 0) fail(ErrorCode::EmptyGraph, "graph needs at least one edge");
  require_connected(g);
}

// Sums fn(block) (rows x k matrix) over probes, reducing in chunk order.
template <class Fn>
Eigen::VectorXd sum_over_probes(const ProbeEnsemble& probes, Eigen::Index rows, const EstimatorOptions& options,
                                Fn&& fn) {
  const std::size_t chunks = chunk_count(probes.count(), options.chunk_size);
  std::vector<Eigen::VectorXd> partial(chunks);
  for_each_chunk(probes.count(), options.chunk_size, options.jobs, [&](std::size_t c, std::size_t first, std::size_t k) {
    RowBlock block = probes.block(first, k);
    partial[c] = fn(block).rowwise().sum();
  });
  Eigen::VectorXd total = Eigen::VectorXd::Zero(rows);
  for (const auto& p : partial) total += p;
  return total;
}

double delta_floorless(double x) { return std::max(x, std::numeric_limits<double>::min()); }

// Resistances on an already rescaled graph.
std::vector<double> sketch_resistances(const WeightedGraph& g, const LaplacianSolver& solver, double U,
                                       double epsilon, std::uint64_t seed, const EstimatorOptions& options) {
  const Vertex n = g.num_vertices();
  const EdgeId m = g.num_edges();
  const std::size_t k = jl_rows(n, epsilon, options);
  const double nn = static_cast<double>(n);
  const double delta = delta_floorless(epsilon / (48.0 * nn * nn * nn * U * U));
  const ProbeEnsemble signs(seed, k, m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));

  std::vector<double> r(static_cast<std::size_t>(m), 0.0);
  const std::size_t chunks = chunk_count(k, options.chunk_size);
  std::vector<std::vector<double>> partial(chunks);
  for_each_chunk(k, options.chunk_size, options.jobs, [&](std::size_t c, std::size_t first, std::size_t count) {
    const RowBlock q = signs.block(first, count);  // m x count
    RowBlock rhs = RowBlock::Zero(n, static_cast<Eigen::Index>(count));
    for (EdgeId e = 0; e < m; ++e) {
      const Edge& ed = g.edge(e);
      const double s = scale * std::sqrt(ed.weight);
      rhs.row(ed.u) += s * q.row(e);
      rhs.row(ed.v) -= s * q.row(e);
    }
    solver.solve_inplace(rhs, delta);
    auto& out = partial[c];
    out.resize(static_cast<std::size_t>(m));
    for (EdgeId e = 0; e < m; ++e) {
      const Edge& ed = g.edge(e);
      out[static_cast<std::size_t>(e)] = (rhs.row(ed.u) - rhs.row(ed.v)).squaredNorm();
    }
  });
  for (const auto& p : partial) {
    for (std::size_t e = 0; e < r.size(); ++e) r[e] += p[e];
  }
  return r;
}

}  // namespace

std::size_t comp1_samples(Vertex n, double epsilon, const EstimatorOptions& options) {
  return resolve_samples(options.quad_constant, n, epsilon, options);
}

std::size_t comp2_samples(Vertex n, double epsilon, const EstimatorOptions& options) {
  return resolve_samples(options.solve_constant, n, epsilon, options);
}

std::size_t jl_rows(Vertex n, double epsilon, const EstimatorOptions& options) {
  if (options.jl_rows > 0) return options.jl_rows;
  require_epsilon(epsilon);
  const double log_n = std::log(std::max(2.0, static_cast<double>(n)));
  return static_cast<std::size_t>(std::max(1.0, std::ceil(options.jl_constant * log_n / (epsilon * epsilon))));
}

CentralityReport edge_cent_comp1(const WeightedGraph& g, double theta, double epsilon, std::uint64_t seed,
                                 const EstimatorOptions& options) {
  const auto start = Clock::now();
  validate(g, theta, epsilon);
  const auto rs = rescale(g);
  const Vertex n = g.num_vertices();
  const std::size_t M = comp1_samples(n, epsilon, options);

  const QuadRecursion tree(laplacian(rs.graph), query_edges(rs.graph), theta, epsilon / 2.0,
                           mix_seed(seed, kFactor), options.elimination);
  const ProbeEnsemble probes(mix_seed(seed, kProbes), M, n);
  const Eigen::VectorXd total =
      sum_over_probes(probes, g.num_edges(), options, [&](const RowBlock& z) { return tree.evaluate(z); });

  CentralityReport report;
  report.kind = CentralityKind::Edge;
  report.method = "quad-est";
  report.theta = theta;
  report.epsilon = epsilon;
  report.seed = seed;
  report.samples = M;
  report.values.resize(static_cast<std::size_t>(g.num_edges()));
  // Rows of evaluate() follow ascending edge id, which is every edge in order.
  const double factor = static_cast<double>(n) / static_cast<double>(M) / rs.unit;
  for (EdgeId e = 0; e < g.num_edges(); ++e) report.values[static_cast<std::size_t>(e)] = factor * total(e);
  report.wall_seconds = seconds_since(start);
  return report;
}

std::vector<double> er_est(const WeightedGraph& g, double epsilon, std::uint64_t seed,
                           const EstimatorOptions& options) {
  require_epsilon(epsilon);
  if (g.num_vertices() < 2 || g.num_edges() == 0) fail(ErrorCode::EmptyGraph, "graph needs at least one edge");
  require_connected(g);
  const auto rs = rescale(g);
  SolverOptions solver_options = options.solver;
  solver_options.seed = mix_seed(seed, kSolver);
  const LaplacianSolver solver(laplacian(rs.graph), solver_options);
  auto r = sketch_resistances(rs.graph, solver, rs.U, epsilon, mix_seed(seed, kSketch), options);
  for (double& x : r) x /= rs.unit;
  return r;
}

CentralityReport edge_cent_comp2(const WeightedGraph& g, double theta, double epsilon, std::uint64_t seed,
                                 const EstimatorOptions& options) {
  const auto start = Clock::now();
  validate(g, theta, epsilon);
  const auto rs = rescale(g);
  const WeightedGraph& h = rs.graph;
  const Vertex n = h.num_vertices();
  const EdgeId m = h.num_edges();
  const double nn = static_cast<double>(n);
  const std::size_t M = comp2_samples(n, epsilon, options);

  SolverOptions solver_options = options.solver;
  solver_options.seed = mix_seed(seed, kSolver);
  const LaplacianSolver solver(laplacian(h), solver_options);
  const double delta = delta_floorless(epsilon / (36.0 * std::pow(nn, 7) * std::pow(rs.U, 4)));

  auto r = sketch_resistances(h, solver, rs.U, theta * epsilon / 9.0, mix_seed(seed, kSketch), options);
  std::vector<double> denominator(static_cast<std::size_t>(m));
  for (EdgeId e = 0; e < m; ++e) {
    const Edge& ed = h.edge(e);
    double den = 1.0 - (1.0 - theta) * ed.weight * r[static_cast<std::size_t>(e)];
    if (den <= 0.5 * theta * std::exp(-epsilon)) {
      // Near-bridge edges: the sketch noise dominates a denominator close to
      // theta, so resolve this resistance directly.
      Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
      b(ed.u) = 1.0;
      b(ed.v) = -1.0;
      const double exact_r = b.dot(solver.solve(b, 1e-12));
      den = 1.0 - (1.0 - theta) * ed.weight * exact_r;
      if (!(den > 0.0)) {
        fail(ErrorCode::DenominatorUnderflow,
             "update denominator for edge " + std::to_string(e) + " is not positive; epsilon is too large for theta");
      }
    }
    denominator[static_cast<std::size_t>(e)] = den;
  }

  const ProbeEnsemble probes(mix_seed(seed, kProbes), M, n);
  const Eigen::VectorXd total = sum_over_probes(probes, m, options, [&](const RowBlock& z) {
    RowBlock y = z;
    solver.solve_inplace(y, delta);
    Eigen::MatrixXd out(m, y.cols());
    for (EdgeId e = 0; e < m; ++e) out.row(e) = (y.row(h.edge(e).u) - y.row(h.edge(e).v)).array().square().matrix();
    return out;
  });

  CentralityReport report;
  report.kind = CentralityKind::Edge;
  report.method = "sherman-morrison";
  report.theta = theta;
  report.epsilon = epsilon;
  report.seed = seed;
  report.samples = M;
  report.values.resize(static_cast<std::size_t>(m));
  for (EdgeId e = 0; e < m; ++e) {
    const double numerator = total(e) / static_cast<double>(M);
    report.values[static_cast<std::size_t>(e)] =
        (1.0 - theta) * nn * h.edge(e).weight * numerator / denominator[static_cast<std::size_t>(e)] / rs.unit;
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

CentralityReport vertex_cent_comp(const WeightedGraph& g, double theta, double epsilon, std::uint64_t seed,
                                  const EstimatorOptions& options) {
  const auto start = Clock::now();
  validate(g, theta, epsilon);
  const auto rs = rescale(g);
  const WeightedGraph& h = rs.graph;
  const Vertex n = h.num_vertices();
  const double nn = static_cast<double>(n);
  const std::size_t M = comp2_samples(n, epsilon, options);

  const Laplacian L = laplacian(h);
  SolverOptions solver_options = options.solver;
  solver_options.seed = mix_seed(seed, kSolver);
  const LaplacianSolver solver(L, solver_options);
  const double delta = delta_floorless(theta * epsilon / (36.0 * std::pow(nn, 7) * std::pow(rs.U, 4)));

  std::vector<Vertex> all(static_cast<std::size_t>(n));
  for (Vertex v = 0; v < n; ++v) all[static_cast<std::size_t>(v)] = v;
  const VertexQuadOperator op(h, L, all, theta, theta * epsilon / 27.0, epsilon / 3.0, mix_seed(seed, kFactor),
                              options.elimination);

  const ProbeEnsemble probes(mix_seed(seed, kProbes), M, n);
  const Eigen::VectorXd total = sum_over_probes(probes, n, options, [&](const RowBlock& z) {
    RowBlock y = z;
    solver.solve_inplace(y, delta);
    return op.evaluate(y);
  });

  CentralityReport report;
  report.kind = CentralityKind::Vertex;
  report.method = "vertex";
  report.theta = theta;
  report.epsilon = epsilon;
  report.seed = seed;
  report.samples = M;
  report.values.resize(static_cast<std::size_t>(n));
  const double factor = (1.0 - theta) * nn / static_cast<double>(M) / rs.unit;
  for (Vertex v = 0; v < n; ++v) report.values[static_cast<std::size_t>(v)] = factor * total(v);
  report.wall_seconds = seconds_since(start);
  return report;
}

}  // namespace kcent
