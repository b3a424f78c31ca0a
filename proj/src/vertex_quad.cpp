#include "kcent/vertex_quad.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "kcent/error.hpp"
#include "kcent/solver.hpp"

namespace kcent {
namespace {

Vertex position(const std::vector<Vertex>& sorted, Vertex v) {
  return static_cast<Vertex>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
}

// W^1/2 B restricted to the support columns.
Eigen::MatrixXd weighted_incidence(const IncidenceBlock& block, const std::vector<Vertex>& support) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(block.size(), static_cast<Eigen::Index>(support.size()));
  for (Eigen::Index i = 0; i < block.size(); ++i) {
    const Edge& e = block.edges[static_cast<std::size_t>(i)];
    const double s = std::sqrt(e.weight);
    B(i, position(support, e.u)) = s;
    B(i, position(support, e.v)) = -s;
  }
  return B;
}

}  // namespace

Eigen::MatrixXd deactivation_operator(const IncidenceBlock& block, const Laplacian& schur, double theta,
                                      double epsilon_factor, std::mt19937_64& rng,
                                      const EliminationOptions& options) {
  require_theta(theta);
  const auto support = block.support();
  if (schur.dimension() != static_cast<Eigen::Index>(support.size())) {
    fail(ErrorCode::DimensionMismatch, "Schur complement must live on the block's support");
  }
  const Eigen::MatrixXd WB = weighted_incidence(block, support);
  const Vertex root[] = {0};
  const PartialCholesky complete = apx_partial_cholesky(schur, root, epsilon_factor, rng, options);
  RowBlock X = WB.transpose();
  apply_complete_pseudo_inverse_inplace(complete, X);
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(block.size(), block.size()) - (1.0 - theta) * (WB * X);
  return 0.5 * (P + P.transpose());
}

namespace {

// Scale of P so its spectrum fits under 1, and the matching kappa.
struct ChebyshevSetup {
  Eigen::MatrixXd scaled;
  double kappa;
  double unscale;
};

ChebyshevSetup chebyshev_setup(const IncidenceBlock& block, const Laplacian& schur, double theta, double epsilon,
                               std::mt19937_64& rng, const EliminationOptions& options) {
  require_epsilon(epsilon);
  const Eigen::MatrixXd P = deactivation_operator(block, schur, theta, epsilon * theta / 9.0, rng, options);
  // The approximate P lies within exp(+-epsilon/3) of an operator with
  // spectrum in [theta, 1]; shrinking by exp(-epsilon/3) puts it in
  // [theta exp(-2 epsilon/3), 1].
  const double shrink = std::exp(-epsilon / 3.0);
  return ChebyshevSetup{shrink * P, std::exp(2.0 * epsilon / 3.0) / theta, shrink};
}

template <class F>
auto spectrum_guard(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BadSpectrumBound) fail(ErrorCode::SpectrumViolation, e.what());
    throw;
  }
}

}  // namespace

Eigen::MatrixXd deactivation_inverse(const IncidenceBlock& block, const Laplacian& schur, double theta,
                                     double epsilon, std::mt19937_64& rng, const EliminationOptions& options) {
  const auto setup = chebyshev_setup(block, schur, theta, epsilon, rng, options);
  Eigen::MatrixXd Z = spectrum_guard([&] { return chebyshev_operator(setup.scaled, setup.kappa, epsilon / 3.0); });
  Z *= setup.unscale;
  return 0.5 * (Z + Z.transpose());
}

double quad_solve(const IncidenceBlock& block, const Eigen::VectorXd& b, double theta, double epsilon,
                  const Laplacian& schur, std::uint64_t seed, const EliminationOptions& options) {
  if (b.size() != block.size()) fail(ErrorCode::DimensionMismatch, "b must have one entry per block edge");
  std::mt19937_64 rng(seed);
  const auto setup = chebyshev_setup(block, schur, theta, epsilon, rng, options);
  const LinearOperator apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return setup.scaled * x; };
  const Eigen::VectorXd x = spectrum_guard([&] { return cheb_solve(apply, setup.kappa, epsilon / 3.0, b); });
  const double value = setup.unscale * b.dot(x);
  if (!(value >= 0.0)) fail(ErrorCode::SpectrumViolation, "quadratic form came out negative");
  return value;
}

namespace {

struct SchurRecursion {
  const WeightedGraph& g;
  double epsilon;
  std::mt19937_64& rng;
  const EliminationOptions& options;
  std::vector<Laplacian> leaves;  // indexed by vertex id; only query vertices set
  std::size_t levels = 0;

  std::vector<Vertex> closed_neighbourhood(std::span<const Vertex> group) const {
    std::vector<Vertex> out(group.begin(), group.end());
    for (Vertex v : group) {
      for (EdgeId e : g.incident(v)) {
        const Edge& ed = g.edge(e);
        out.push_back(ed.u == v ? ed.v : ed.u);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Schur complement of S (on `vertices`) onto `target`, a subset.
  Laplacian restrict(const Laplacian& S, const std::vector<Vertex>& vertices, const std::vector<Vertex>& target) {
    if (target.size() == vertices.size()) return S;
    std::vector<Vertex> positions;
    positions.reserve(target.size());
    for (Vertex v : target) positions.push_back(position(vertices, v));
    return apx_partial_cholesky(S, positions, epsilon, rng, options).schur;
  }

  void run(const Laplacian& S, const std::vector<Vertex>& vertices, const std::vector<Vertex>& query,
           std::size_t level) {
    levels = std::max(levels, level);
    if (query.size() == 1) {
      const Vertex v = query.front();
      leaves[static_cast<std::size_t>(v)] = restrict(S, vertices, closed_neighbourhood(query));
      return;
    }
    std::size_t vol = 0;
    for (Vertex v : query) vol += static_cast<std::size_t>(g.degree(v));

    std::vector<std::vector<Vertex>> groups;
    std::vector<Vertex> rest;
    for (Vertex v : query) {
      if (4 * static_cast<std::size_t>(g.degree(v)) >= vol) {
        groups.push_back({v});
      } else {
        rest.push_back(v);
      }
    }
    if (groups.empty()) {
      std::size_t prefix = 0;
      std::size_t cut = 0;
      while (cut < query.size() && 2 * prefix < vol) prefix += static_cast<std::size_t>(g.degree(query[cut++]));
      groups.emplace_back(query.begin(), query.begin() + static_cast<std::ptrdiff_t>(cut));
      groups.emplace_back(query.begin() + static_cast<std::ptrdiff_t>(cut), query.end());
    } else if (!rest.empty()) {
      groups.push_back(std::move(rest));
    }
    for (const auto& group : groups) {
      if (group.empty()) continue;
      const auto target = closed_neighbourhood(group);
      run(restrict(S, vertices, target), target, group, level + 1);
    }
  }
};

}  // namespace

VertexQuadOperator::VertexQuadOperator(const WeightedGraph& g, const Laplacian& S, std::span<const Vertex> query,
                                       double theta, double epsilon_schur, double epsilon, std::uint64_t seed,
                                       const EliminationOptions& options)
    : dimension_(g.num_vertices()) {
  require_theta(theta);
  require_epsilon(epsilon);
  if (!(epsilon_schur >= 0.0 && epsilon_schur <= 0.5)) {
    fail(ErrorCode::EpsilonOutOfRange, "Schur budget must lie in [0, 1/2]");
  }
  if (S.dimension() != g.num_vertices()) fail(ErrorCode::DimensionMismatch, "S must be indexed like the graph");
  vertices_.assign(query.begin(), query.end());
  std::sort(vertices_.begin(), vertices_.end());
  vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
  if (vertices_.empty()) fail(ErrorCode::CoverageViolation, "empty query vertex set");
  for (Vertex v : vertices_) {
    if (v < 0 || v >= g.num_vertices()) fail(ErrorCode::CoverageViolation, "query vertex out of range");
    if (g.degree(v) == 0) fail(ErrorCode::CoverageViolation, "query vertex " + std::to_string(v) + " has no edges");
  }

  std::size_t vol = 0;
  for (Vertex v : vertices_) vol += static_cast<std::size_t>(g.degree(v));
  const double depth = std::max(1.0, std::log(static_cast<double>(vol)) / std::log(4.0 / 3.0));
  std::mt19937_64 rng(seed);
  SchurRecursion recursion{g, epsilon_schur / depth, rng, options, {}, 0};
  recursion.leaves.resize(static_cast<std::size_t>(g.num_vertices()));

  std::vector<Vertex> all(static_cast<std::size_t>(g.num_vertices()));
  for (Vertex v = 0; v < g.num_vertices(); ++v) all[static_cast<std::size_t>(v)] = v;
  const auto target = recursion.closed_neighbourhood(vertices_);
  recursion.run(recursion.restrict(S, all, target), target, vertices_, 0);
  levels_ = recursion.levels;

  local_.reserve(vertices_.size());
  for (Vertex v : vertices_) {
    const auto incident = g.incident(v);
    const IncidenceBlock block = incidence_block(g, incident);
    Local local;
    local.edges = block.edges;
    local.inverse = deactivation_inverse(block, recursion.leaves[static_cast<std::size_t>(v)], theta, epsilon, rng,
                                         options);
    local_.push_back(std::move(local));
  }
}

Eigen::MatrixXd VertexQuadOperator::evaluate(const RowBlock& z) const {
  if (z.rows() != dimension_) fail(ErrorCode::DimensionMismatch, "probe dimension mismatch");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(vertices_.size()), z.cols());
  for (std::size_t i = 0; i < local_.size(); ++i) {
    const auto& local = local_[i];
    Eigen::MatrixXd b(static_cast<Eigen::Index>(local.edges.size()), z.cols());
    for (std::size_t r = 0; r < local.edges.size(); ++r) {
      const Edge& e = local.edges[r];
      b.row(static_cast<Eigen::Index>(r)) = std::sqrt(e.weight) * (z.row(e.u) - z.row(e.v));
    }
    out.row(static_cast<Eigen::Index>(i)) = b.cwiseProduct(local.inverse * b).colwise().sum();
  }
  return out;
}

std::map<Vertex, double> VertexQuadOperator::evaluate(const Eigen::VectorXd& z) const {
  RowBlock block = z;
  const Eigen::MatrixXd values = evaluate(block);
  std::map<Vertex, double> out;
  for (std::size_t i = 0; i < vertices_.size(); ++i) out.emplace(vertices_[i], values(static_cast<Eigen::Index>(i), 0));
  return out;
}

std::map<Vertex, double> quad_approx(const WeightedGraph& g, const Laplacian& S, std::span<const Vertex> query,
                                     const Eigen::VectorXd& z, double theta, double epsilon_schur, double epsilon,
                                     std::uint64_t seed, const EliminationOptions& options) {
  return VertexQuadOperator(g, S, query, theta, epsilon_schur, epsilon, seed, options).evaluate(z);
}

}  // namespace kcent
