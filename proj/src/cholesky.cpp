#include "kcent/cholesky.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>

#include "kcent/error.hpp"

namespace kcent {
namespace {

std::vector<Vertex> normalize_retained(Eigen::Index n, std::span<const Vertex> retained) {
  if (retained.empty()) fail(ErrorCode::EmptyRetainSet, "retained vertex set is empty");
  std::vector<Vertex> c(retained.begin(), retained.end());
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  if (c.front() < 0 || c.back() >= n) fail(ErrorCode::InvalidArgument, "retained vertex out of range");
  return c;
}

std::vector<char> retained_mask(Eigen::Index n, const std::vector<Vertex>& c) {
  std::vector<char> mask(static_cast<std::size_t>(n), 0);
  for (Vertex v : c) mask[static_cast<std::size_t>(v)] = 1;
  return mask;
}

void check_order(Eigen::Index n, const std::vector<char>& keep, std::span<const Vertex> order) {
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::size_t expected = 0;
  for (char k : keep) expected += k ? 0 : 1;
  if (order.size() != expected) fail(ErrorCode::InvalidArgument, "elimination order must cover exactly V \\ C");
  for (Vertex v : order) {
    if (v < 0 || v >= n || keep[static_cast<std::size_t>(v)] || seen[static_cast<std::size_t>(v)]) {
      fail(ErrorCode::InvalidArgument, "elimination order is not a permutation of V \\ C");
    }
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

// Picks the next vertex: the supplied order if any, else minimum degree with
// lowest-id ties.
class Scheduler {
 public:
  Scheduler(const std::vector<char>& keep, std::span<const Vertex> order, const std::vector<std::size_t>& degree)
      : order_(order), key_(degree) {
    if (order_.empty()) {
      for (std::size_t v = 0; v < keep.size(); ++v) {
        if (!keep[v]) queue_.emplace(key_[v], static_cast<Vertex>(v));
      }
      remaining_ = queue_.size();
    } else {
      remaining_ = order_.size();
    }
    active_.assign(keep.size(), 0);
    for (std::size_t v = 0; v < keep.size(); ++v) active_[v] = keep[v] ? 0 : 1;
  }

  bool empty() const { return remaining_ == 0; }

  Vertex next() {
    --remaining_;
    Vertex v;
    if (order_.empty()) {
      v = queue_.begin()->second;
      queue_.erase(queue_.begin());
    } else {
      v = order_[cursor_++];
    }
    active_[static_cast<std::size_t>(v)] = 0;
    return v;
  }

  void update(Vertex v, std::size_t degree) {
    const auto i = static_cast<std::size_t>(v);
    if (!active_[i] || key_[i] == degree) return;
    if (order_.empty()) {
      queue_.erase({key_[i], v});
      queue_.emplace(degree, v);
    }
    key_[i] = degree;
  }

 private:
  std::span<const Vertex> order_;
  std::size_t cursor_ = 0;
  std::size_t remaining_ = 0;
  std::vector<std::size_t> key_;
  std::vector<char> active_;
  std::set<std::pair<std::size_t, Vertex>> queue_;
};

void push_column(PartialCholesky& pc, Vertex v, double pivot, const std::vector<std::pair<Vertex, double>>& nbrs) {
  pc.eliminated.push_back(v);
  pc.pivots.push_back(pivot);
  for (const auto& [u, w] : nbrs) {
    pc.column_rows.push_back(u);
    pc.column_values.push_back(-w / pivot);
  }
  pc.column_offsets.push_back(pc.column_rows.size());
}

void require_pivot(double pivot, Vertex v) {
  if (!(pivot > 0.0)) {
    fail(ErrorCode::Disconnected, "vertex " + std::to_string(v) + " has no path to the retained set");
  }
}

Laplacian retained_laplacian(const std::vector<Vertex>& c, Eigen::Index n, const std::vector<Edge>& remaining) {
  std::vector<Vertex> position(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < c.size(); ++i) position[static_cast<std::size_t>(c[i])] = static_cast<Vertex>(i);
  std::vector<Edge> local;
  local.reserve(remaining.size());
  for (const Edge& e : remaining) {
    const Vertex a = position[static_cast<std::size_t>(e.u)];
    const Vertex b = position[static_cast<std::size_t>(e.v)];
    local.push_back(Edge{std::min(a, b), std::max(a, b), e.weight});
  }
  return Laplacian::from_edges(static_cast<Eigen::Index>(c.size()), local);
}

PartialCholesky eliminate_exact(const Laplacian& L, std::vector<Vertex> c, std::span<const Vertex> order) {
  const Eigen::Index n = L.dimension();
  const auto keep = retained_mask(n, c);
  if (!order.empty()) check_order(n, keep, order);

  std::vector<std::unordered_map<Vertex, double>> adj(static_cast<std::size_t>(n));
  for (const Edge& e : L.edges()) {
    adj[static_cast<std::size_t>(e.u)][e.v] += e.weight;
    adj[static_cast<std::size_t>(e.v)][e.u] += e.weight;
  }
  std::vector<std::size_t> degree(static_cast<std::size_t>(n));
  for (std::size_t v = 0; v < degree.size(); ++v) degree[v] = adj[v].size();

  PartialCholesky pc;
  pc.dimension = n;
  pc.retained = c;
  pc.exact = true;

  Scheduler schedule(keep, order, degree);
  std::vector<std::pair<Vertex, double>> nbrs;
  while (!schedule.empty()) {
    const Vertex v = schedule.next();
    auto& row = adj[static_cast<std::size_t>(v)];
    nbrs.assign(row.begin(), row.end());
    std::sort(nbrs.begin(), nbrs.end());
    row.clear();

    double pivot = 0.0;
    for (const auto& [u, w] : nbrs) pivot += w;
    require_pivot(pivot, v);
    push_column(pc, v, pivot, nbrs);

    for (const auto& [u, w] : nbrs) adj[static_cast<std::size_t>(u)].erase(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
        const double fill = nbrs[i].second * nbrs[j].second / pivot;
        adj[static_cast<std::size_t>(nbrs[i].first)][nbrs[j].first] += fill;
        adj[static_cast<std::size_t>(nbrs[j].first)][nbrs[i].first] += fill;
      }
    }
    for (const auto& [u, w] : nbrs) schedule.update(u, adj[static_cast<std::size_t>(u)].size());
  }

  std::vector<Edge> remaining;
  for (Vertex a : c) {
    for (const auto& [b, w] : adj[static_cast<std::size_t>(a)]) {
      if (a < b) remaining.push_back(Edge{a, b, w});
    }
  }
  std::sort(remaining.begin(), remaining.end(),
            [](const Edge& x, const Edge& y) { return std::tie(x.u, x.v) < std::tie(y.u, y.v); });
  pc.schur = retained_laplacian(c, n, remaining);
  return pc;
}

struct MultiEdge {
  Vertex a;
  Vertex b;
  double weight;
  bool alive;
};

PartialCholesky eliminate_sampled(const Laplacian& L, std::vector<Vertex> c, double epsilon, std::size_t copies,
                                  std::mt19937_64& rng) {
  const Eigen::Index n = L.dimension();
  const auto keep = retained_mask(n, c);

  std::vector<MultiEdge> pool;
  std::vector<std::vector<std::uint32_t>> lists(static_cast<std::size_t>(n));
  std::vector<std::size_t> alive(static_cast<std::size_t>(n), 0);
  auto add_edge = [&](Vertex a, Vertex b, double w) {
    const auto id = static_cast<std::uint32_t>(pool.size());
    pool.push_back(MultiEdge{a, b, w, true});
    lists[static_cast<std::size_t>(a)].push_back(id);
    lists[static_cast<std::size_t>(b)].push_back(id);
    ++alive[static_cast<std::size_t>(a)];
    ++alive[static_cast<std::size_t>(b)];
  };
  for (const Edge& e : L.edges()) {
    const double piece = e.weight / static_cast<double>(copies);
    for (std::size_t k = 0; k < copies; ++k) add_edge(e.u, e.v, piece);
  }

  PartialCholesky pc;
  pc.dimension = n;
  pc.retained = c;
  pc.exact = false;
  pc.epsilon = epsilon;

  Scheduler schedule(keep, {}, alive);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<Vertex, double>> star;  // (neighbour, weight) per live multi-edge
  std::vector<double> cumulative;
  std::vector<std::pair<Vertex, double>> merged;
  std::vector<Vertex> touched;
  while (!schedule.empty()) {
    const Vertex v = schedule.next();
    star.clear();
    for (std::uint32_t id : lists[static_cast<std::size_t>(v)]) {
      MultiEdge& me = pool[id];
      if (!me.alive) continue;
      me.alive = false;
      const Vertex u = me.a == v ? me.b : me.a;
      --alive[static_cast<std::size_t>(u)];
      star.emplace_back(u, me.weight);
    }
    lists[static_cast<std::size_t>(v)].clear();
    lists[static_cast<std::size_t>(v)].shrink_to_fit();

    merged = star;
    std::sort(merged.begin(), merged.end());
    std::size_t out = 0;
    for (std::size_t i = 0; i < merged.size(); ++i) {
      if (out > 0 && merged[out - 1].first == merged[i].first) {
        merged[out - 1].second += merged[i].second;
      } else {
        merged[out++] = merged[i];
      }
    }
    merged.resize(out);

    double pivot = 0.0;
    cumulative.clear();
    for (const auto& [u, w] : star) {
      pivot += w;
      cumulative.push_back(pivot);
    }
    require_pivot(pivot, v);
    push_column(pc, v, pivot, merged);

    // Each live multi-edge (v,u_i) picks a partner u_j with probability
    // w_j / pivot; the sampled edge (u_i,u_j) gets w_i w_j / (w_i + w_j), so
    // the expectation equals the exact elimination clique.
    for (const auto& [ui, wi] : star) {
      const double r = unit(rng) * pivot;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
      if (it == cumulative.end()) --it;
      const auto& [uj, wj] = star[static_cast<std::size_t>(it - cumulative.begin())];
      if (uj == ui) continue;
      add_edge(ui, uj, wi * wj / (wi + wj));
    }
    for (const auto& [u, w] : merged) schedule.update(u, alive[static_cast<std::size_t>(u)]);
  }

  std::vector<Edge> remaining;
  for (const MultiEdge& me : pool) {
    if (me.alive) remaining.push_back(Edge{std::min(me.a, me.b), std::max(me.a, me.b), me.weight});
  }
  pc.schur = retained_laplacian(c, n, remaining);
  return pc;
}

}  // namespace

Eigen::MatrixXd PartialCholesky::lower_factor() const {
  Eigen::MatrixXd lower = Eigen::MatrixXd::Identity(dimension, dimension);
  for (std::size_t k = 0; k < eliminated.size(); ++k) {
    for (std::size_t p = column_offsets[k]; p < column_offsets[k + 1]; ++p) {
      lower(column_rows[p], eliminated[k]) = column_values[p];
    }
  }
  return lower;
}

Eigen::MatrixXd PartialCholesky::reassemble() const {
  Eigen::MatrixXd middle = Eigen::MatrixXd::Zero(dimension, dimension);
  for (std::size_t k = 0; k < eliminated.size(); ++k) middle(eliminated[k], eliminated[k]) = pivots[k];
  const Eigen::MatrixXd s = schur.dense();
  for (std::size_t i = 0; i < retained.size(); ++i) {
    for (std::size_t j = 0; j < retained.size(); ++j) {
      middle(retained[i], retained[j]) = s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  const Eigen::MatrixXd lower = lower_factor();
  return lower * middle * lower.transpose();
}

Laplacian exact_schur(const Laplacian& L, std::span<const Vertex> retained, std::span<const Vertex> order) {
  return exact_partial_cholesky(L, retained, order).schur;
}

PartialCholesky exact_partial_cholesky(const Laplacian& L, std::span<const Vertex> retained,
                                       std::span<const Vertex> order) {
  auto pc = eliminate_exact(L, normalize_retained(L.dimension(), retained), order);
  if (pc.eliminated.empty()) pc.schur = L;
  return pc;
}

PartialCholesky apx_partial_cholesky(const Laplacian& L, std::span<const Vertex> retained, double epsilon,
                                     std::mt19937_64& rng, const EliminationOptions& options) {
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) {
    fail(ErrorCode::EpsilonOutOfRange, "epsilon must lie in (0, 1/2], got " + std::to_string(epsilon));
  }
  auto c = normalize_retained(L.dimension(), retained);
  const Eigen::Index n = L.dimension();
  if (static_cast<Eigen::Index>(c.size()) == n) return exact_partial_cholesky(L, c);
  if (epsilon == 0.0) return eliminate_exact(L, std::move(c), {});

  const double log_n = std::log(std::max<double>(2.0, static_cast<double>(n)));
  const double rho = std::ceil(options.sample_constant * log_n / (epsilon * epsilon));
  if (options.exact_fallback && (n <= options.exact_below || rho >= static_cast<double>(n))) {
    return eliminate_exact(L, std::move(c), {});
  }
  return eliminate_sampled(L, std::move(c), epsilon, static_cast<std::size_t>(std::max(1.0, rho)), rng);
}

Eigen::VectorXd apply_factor_inverse(const PartialCholesky& pc, const Eigen::VectorXd& b) {
  if (b.size() != pc.dimension) fail(ErrorCode::DimensionMismatch, "vector size does not match factor");
  RowBlock block = b;
  apply_factor_inverse_inplace(pc, block);
  return block.col(0);
}

void apply_factor_inverse_inplace(const PartialCholesky& pc, RowBlock& block) {
  if (block.rows() != pc.dimension) fail(ErrorCode::DimensionMismatch, "block rows do not match factor");
  for (std::size_t k = 0; k < pc.eliminated.size(); ++k) {
    const auto v = pc.eliminated[k];
    for (std::size_t p = pc.column_offsets[k]; p < pc.column_offsets[k + 1]; ++p) {
      block.row(pc.column_rows[p]) -= pc.column_values[p] * block.row(v);
    }
  }
}

void apply_factor_transpose_inverse_inplace(const PartialCholesky& pc, RowBlock& block) {
  if (block.rows() != pc.dimension) fail(ErrorCode::DimensionMismatch, "block rows do not match factor");
  for (std::size_t k = pc.eliminated.size(); k-- > 0;) {
    const auto v = pc.eliminated[k];
    for (std::size_t p = pc.column_offsets[k]; p < pc.column_offsets[k + 1]; ++p) {
      block.row(v) -= pc.column_values[p] * block.row(pc.column_rows[p]);
    }
  }
}

void apply_complete_pseudo_inverse_inplace(const PartialCholesky& pc, RowBlock& block) {
  if (pc.retained.size() != 1) fail(ErrorCode::InvalidArgument, "factorization is not complete");
  apply_factor_inverse_inplace(pc, block);
  for (std::size_t k = 0; k < pc.eliminated.size(); ++k) block.row(pc.eliminated[k]) /= pc.pivots[k];
  block.row(pc.retained.front()).setZero();
  apply_factor_transpose_inverse_inplace(pc, block);
  project_out_constant(block);
}

void project_out_constant(RowBlock& block) {
  if (block.rows() == 0) return;
  const Eigen::RowVectorXd mean = block.colwise().mean();
  block.rowwise() -= mean;
}

}  // namespace kcent
