#include "kcent/quad.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "kcent/error.hpp"

namespace kcent {

namespace {

struct LocalEdge {
  std::size_t slot;
  Vertex u;
  Vertex v;
  double weight;
};

}  // namespace

struct QuadBranch {
  PartialCholesky factor;
  std::unique_ptr<QuadNode> child;
};

struct QuadNode {
  Eigen::Index dimension = 0;
  double conductance = 0.0;      // leaves only: the single edge of a 2-vertex Laplacian
  std::vector<LocalEdge> leaf;   // leaves only
  std::vector<QuadBranch> branches;
};

namespace {

std::vector<Vertex> endpoints(std::span<const LocalEdge> edges) {
  std::vector<Vertex> c;
  c.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    c.push_back(e.u);
    c.push_back(e.v);
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

Vertex position(const std::vector<Vertex>& sorted, Vertex v) {
  return static_cast<Vertex>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
}

std::uint64_t pair_key(Vertex a, Vertex b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

// L minus the Laplacian of `part`. Each query conductance must be present in L.
Laplacian subtract_edges(const Laplacian& L, std::span<const LocalEdge> part) {
  std::vector<std::pair<std::uint64_t, double>> removed;
  removed.reserve(part.size());
  for (const auto& e : part) removed.emplace_back(pair_key(e.u, e.v), e.weight);
  std::sort(removed.begin(), removed.end());

  std::vector<Edge> kept;
  for (const Edge& e : L.edges()) {
    const auto key = pair_key(e.u, e.v);
    double w = e.weight;
    auto it = std::lower_bound(removed.begin(), removed.end(), std::make_pair(key, -1.0));
    for (; it != removed.end() && it->first == key; ++it) w -= it->second;
    if (w < -1e-9 * e.weight) {
      fail(ErrorCode::InvalidArgument, "query edge weight exceeds the conductance present in the Laplacian");
    }
    if (w > 1e-12 * e.weight) kept.push_back(Edge{e.u, e.v, w});
  }
  return Laplacian::from_edges(L.dimension(), kept);
}

Laplacian add_edges(const Laplacian& S, std::span<const LocalEdge> part, const std::vector<Vertex>& retained) {
  auto edges = S.edges();
  for (const auto& e : part) edges.push_back(Edge{position(retained, e.u), position(retained, e.v), e.weight});
  return Laplacian::from_edges(S.dimension(), edges);
}

std::unique_ptr<QuadNode> build_node(const Laplacian& L, std::vector<LocalEdge> edges, double epsilon,
                                     std::mt19937_64& rng, const EliminationOptions& options) {
  auto node = std::make_unique<QuadNode>();
  node->dimension = L.dimension();
  if (L.dimension() == 2) {
    node->conductance = -L.matrix().coeff(0, 1);
    node->leaf = std::move(edges);
    return node;
  }

  const std::size_t half = edges.size() / 2;
  const double level_eps =
      epsilon > 0.0 ? epsilon / std::max(1.0, std::log2(static_cast<double>(edges.size()))) : 0.0;
  const std::span<const LocalEdge> all(edges);
  for (const auto part : {all.first(half), all.subspan(half)}) {
    if (part.empty()) continue;
    const auto c = endpoints(part);
    QuadBranch branch;
    Laplacian schur;
    if (level_eps == 0.0) {
      branch.factor = exact_partial_cholesky(L, c);
      schur = branch.factor.schur;
    } else {
      branch.factor = apx_partial_cholesky(subtract_edges(L, part), c, level_eps, rng, options);
      schur = add_edges(branch.factor.schur, part, c);
    }
    std::vector<LocalEdge> child_edges;
    child_edges.reserve(part.size());
    for (const auto& e : part) child_edges.push_back(LocalEdge{e.slot, position(c, e.u), position(c, e.v), e.weight});
    const double rest = epsilon > 0.0 ? std::max(epsilon - level_eps, 0.0) : 0.0;
    // A spent budget below the leaves would mean exact factoring, which is fine.
    branch.child = build_node(schur, std::move(child_edges), rest, rng, options);
    node->branches.push_back(std::move(branch));
  }
  return node;
}

void evaluate_node(const QuadNode& node, const RowBlock& y, const Eigen::RowVectorXd& acc, double theta,
                   Eigen::MatrixXd& out) {
  if (node.branches.empty()) {
    const Eigen::RowVectorXd diff2 = (y.row(0) - y.row(1)).array().square().matrix();
    for (const auto& e : node.leaf) {
      const double a = node.conductance - (1.0 - theta) * e.weight;
      if (!(a > 0.0)) fail(ErrorCode::SpectrumViolation, "deactivated conductance is not positive");
      out.row(static_cast<Eigen::Index>(e.slot)) = acc + diff2 / (4.0 * a);
    }
    return;
  }
  for (const auto& branch : node.branches) {
    RowBlock t = y;
    apply_factor_inverse_inplace(branch.factor, t);
    Eigen::RowVectorXd f = acc;
    for (std::size_t k = 0; k < branch.factor.eliminated.size(); ++k) {
      f += t.row(branch.factor.eliminated[k]).array().square().matrix() / branch.factor.pivots[k];
    }
    RowBlock yc(static_cast<Eigen::Index>(branch.factor.retained.size()), t.cols());
    for (std::size_t i = 0; i < branch.factor.retained.size(); ++i) {
      yc.row(static_cast<Eigen::Index>(i)) = t.row(branch.factor.retained[i]);
    }
    evaluate_node(*branch.child, yc, f, theta, out);
  }
}

std::size_t node_depth(const QuadNode& node) {
  std::size_t d = 0;
  for (const auto& b : node.branches) d = std::max(d, node_depth(*b.child));
  return d + 1;
}

std::size_t node_nonzeros(const QuadNode& node) {
  std::size_t total = 0;
  for (const auto& b : node.branches) total += b.factor.factor_nonzeros() + node_nonzeros(*b.child);
  return total;
}

}  // namespace

std::vector<QueryEdge> query_edges(const WeightedGraph& g) {
  std::vector<QueryEdge> out;
  out.reserve(static_cast<std::size_t>(g.num_edges()));
  for (EdgeId e = 0; e < g.num_edges(); ++e) out.push_back(QueryEdge{e, g.edge(e).u, g.edge(e).v, g.edge(e).weight});
  return out;
}

std::vector<QueryEdge> query_edges(const WeightedGraph& g, std::span<const EdgeId> ids) {
  std::vector<QueryEdge> out;
  out.reserve(ids.size());
  for (EdgeId e : ids) {
    if (e < 0 || e >= g.num_edges()) fail(ErrorCode::UnknownEdge, "unknown edge id " + std::to_string(e));
    out.push_back(QueryEdge{e, g.edge(e).u, g.edge(e).v, g.edge(e).weight});
  }
  return out;
}

QuadRecursion::QuadRecursion(const Laplacian& L, std::vector<QueryEdge> query, double theta, double epsilon,
                             std::uint64_t seed, const EliminationOptions& options)
    : query_(std::move(query)), dimension_(L.dimension()), theta_(theta), epsilon_(epsilon), exact_(epsilon == 0.0) {
  require_theta(theta);
  if (epsilon != 0.0) require_epsilon(epsilon);
  if (dimension_ < 2) fail(ErrorCode::EmptyGraph, "need at least two vertices");
  if (query_.empty()) fail(ErrorCode::CoverageViolation, "empty query edge set");
  std::sort(query_.begin(), query_.end(), [](const QueryEdge& a, const QueryEdge& b) { return a.id < b.id; });

  std::vector<char> covered(static_cast<std::size_t>(dimension_), 0);
  std::vector<LocalEdge> local;
  local.reserve(query_.size());
  for (std::size_t i = 0; i < query_.size(); ++i) {
    const auto& q = query_[i];
    if (i > 0 && query_[i - 1].id == q.id) fail(ErrorCode::InvalidArgument, "duplicate query edge id");
    if (q.u < 0 || q.v < 0 || q.u >= dimension_ || q.v >= dimension_) {
      fail(ErrorCode::UnknownEdge, "query edge endpoint out of range");
    }
    if (q.u == q.v) fail(ErrorCode::SelfLoop, "query edge is a self-loop");
    if (!(q.weight > 0.0)) fail(ErrorCode::NonPositiveWeight, "query edge weight must be positive");
    covered[static_cast<std::size_t>(q.u)] = 1;
    covered[static_cast<std::size_t>(q.v)] = 1;
    local.push_back(LocalEdge{i, q.u, q.v, q.weight});
  }
  for (std::size_t v = 0; v < covered.size(); ++v) {
    if (!covered[v]) fail(ErrorCode::CoverageViolation, "vertex " + std::to_string(v) + " touches no query edge");
  }
  std::mt19937_64 rng(seed);
  root_ = build_node(L, std::move(local), epsilon, rng, options);
}

QuadRecursion::~QuadRecursion() = default;
QuadRecursion::QuadRecursion(QuadRecursion&&) noexcept = default;
QuadRecursion& QuadRecursion::operator=(QuadRecursion&&) noexcept = default;

std::size_t QuadRecursion::depth() const { return node_depth(*root_); }
std::size_t QuadRecursion::factor_nonzeros() const { return node_nonzeros(*root_); }

Eigen::MatrixXd QuadRecursion::evaluate(const RowBlock& probes) const {
  if (probes.rows() != dimension_) fail(ErrorCode::DimensionMismatch, "probe dimension mismatch");
  RowBlock y = probes;
  project_out_constant(y);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(query_.size()), probes.cols());
  evaluate_node(*root_, y, Eigen::RowVectorXd::Zero(probes.cols()), theta_, out);
  return out;
}

std::map<EdgeId, double> QuadRecursion::evaluate(const Eigen::VectorXd& z) const {
  RowBlock block = z;
  const Eigen::MatrixXd values = evaluate(block);
  std::map<EdgeId, double> out;
  for (std::size_t i = 0; i < query_.size(); ++i) out.emplace(query_[i].id, values(static_cast<Eigen::Index>(i), 0));
  return out;
}

std::map<EdgeId, double> exact_quad(const Laplacian& L, std::span<const QueryEdge> query, const Eigen::VectorXd& z,
                                    double theta) {
  return QuadRecursion(L, {query.begin(), query.end()}, theta, 0.0).evaluate(z);
}

std::map<EdgeId, double> quad_est(const Laplacian& L, std::span<const QueryEdge> query, const Eigen::VectorXd& z,
                                  double theta, double epsilon, std::uint64_t seed,
                                  const EliminationOptions& options) {
  require_epsilon(epsilon);
  return QuadRecursion(L, {query.begin(), query.end()}, theta, epsilon, seed, options).evaluate(z);
}

}  // namespace kcent
