#include <doctest.h>

#include <limits>
#include <numeric>

#include "kcent/error.hpp"
#include "kcent/oracle.hpp"
#include "support.hpp"

using namespace kcent;

namespace {

template <class F>
ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

// Edge betweenness by all-pairs distances and path counting.
std::vector<double> brute_betweenness(const WeightedGraph& g) {
  const Vertex n = g.num_vertices();
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, inf);
  for (Vertex v = 0; v < n; ++v) d(v, v) = 0.0;
  for (const Edge& e : g.edges()) d(e.u, e.v) = d(e.v, e.u) = std::min(d(e.u, e.v), 1.0 / e.weight);
  for (Vertex k = 0; k < n; ++k)
    for (Vertex i = 0; i < n; ++i)
      for (Vertex j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  auto tight = [&](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
  // sigma(s,t): number of shortest paths, by increasing distance from s.
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n, n);
  for (Vertex s = 0; s < n; ++s) {
    std::vector<Vertex> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return d(s, a) < d(s, b); });
    sigma(s, s) = 1.0;
    for (Vertex t : order) {
      if (t == s) continue;
      for (EdgeId e : g.incident(t)) {
        const Edge& ed = g.edge(e);
        const Vertex u = ed.u == t ? ed.v : ed.u;
        if (tight(d(s, u) + 1.0 / ed.weight, d(s, t))) sigma(s, t) += sigma(s, u);
      }
    }
  }
  std::vector<double> out(static_cast<std::size_t>(g.num_edges()), 0.0);
  for (Vertex s = 0; s < n; ++s) {
    for (Vertex t = s + 1; t < n; ++t) {
      for (EdgeId e = 0; e < g.num_edges(); ++e) {
        const Edge& ed = g.edge(e);
        const double len = 1.0 / ed.weight;
        double through = 0.0;
        if (tight(d(s, ed.u) + len + d(ed.v, t), d(s, t))) through += sigma(s, ed.u) * sigma(ed.v, t);
        if (tight(d(s, ed.v) + len + d(ed.u, t), d(s, t))) through += sigma(s, ed.v) * sigma(ed.u, t);
        out[static_cast<std::size_t>(e)] += through / sigma(s, t);
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("effective resistance examples") {
  CHECK(effective_resistance(kt::k2(), 0, 1) == doctest::Approx(1.0));
  CHECK(effective_resistance(kt::triangle(), 0, 2) == doctest::Approx(2.0 / 3.0));
  CHECK(effective_resistance(kt::p3(), 0, 2) == doctest::Approx(2.0));
  CHECK(code_of([] { effective_resistance(kt::p3(), 1, 1); }) == ErrorCode::SameVertex);
  const std::vector<Edge> two{{0, 1, 1.0}, {2, 3, 1.0}};
  CHECK(code_of([&] { effective_resistance(build_graph(two), 0, 2); }) == ErrorCode::Disconnected);
}

TEST_CASE("Kirchhoff index examples") {
  CHECK(kirchhoff_index(kt::k2()) == doctest::Approx(1.0));
  CHECK(kirchhoff_index(kt::triangle()) == doctest::Approx(2.0));
  CHECK(kirchhoff_index(kt::star3()) == doctest::Approx(9.0));
  const std::vector<Edge> two{{0, 1, 1.0}, {2, 3, 1.0}};
  CHECK(code_of([&] { kirchhoff_index(build_graph(two)); }) == ErrorCode::Disconnected);
}

TEST_CASE("trace form equals the pair sum") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 100; ++t) {
    const auto g = kt::random_graph(rng, 2 + t % 39, t % 13);
    const double kf = kirchhoff_index(g);
    CHECK(std::abs(kf - kirchhoff_index_pairwise(g)) <= 1e-7 * kf);
    const Eigen::MatrixXd P = kt::oracle_pinv(g);
    double pairs = 0.0;
    for (Vertex u = 0; u < g.num_vertices(); ++u)
      for (Vertex v = u + 1; v < g.num_vertices(); ++v) pairs += P(u, u) + P(v, v) - 2 * P(u, v);
    CHECK(std::abs(kf - pairs) <= 1e-7 * kf);
  }
}

TEST_CASE("edge centrality examples") {
  CHECK(exact_edge_centrality(kt::k2(), 0, 0.5) == doctest::Approx(2.0));
  CHECK(exact_edge_centrality(kt::triangle(), 0, 0.5) == doctest::Approx(2.5));
  CHECK(exact_edge_centrality(kt::p3(), 0, 0.5) == doctest::Approx(6.0));
  CHECK(exact_edge_centrality_delta(kt::k2(), 0, 0.5) == doctest::Approx(1.0));
  CHECK(exact_edge_centrality_delta(kt::triangle(), 0, 0.5) == doctest::Approx(0.5));
  CHECK(exact_edge_centrality_delta(kt::p3(), 0, 0.5) == doctest::Approx(2.0));
  // Kf of the theta-deleted triangle is (4 + 2 theta) / (1 + 2 theta).
  for (double theta : {0.05, 0.1, 0.3, 0.5}) {
    CHECK(exact_edge_centrality(kt::triangle(), 1, theta) == doctest::Approx((4 + 2 * theta) / (1 + 2 * theta)));
  }
}

TEST_CASE("vertex centrality examples") {
  CHECK(exact_vertex_centrality_delta(kt::star3(), 0, 0.5) == doctest::Approx(9.0));
  CHECK(exact_vertex_centrality_delta(kt::star3(), 1, 0.5) == doctest::Approx(3.0));
  CHECK(exact_vertex_centrality_delta(kt::k2(), 0, 0.5) == doctest::Approx(1.0));
  CHECK(exact_vertex_centrality_delta(kt::k2(), 1, 0.5) == doctest::Approx(1.0));
  const auto report = exact_vertex_centralities(kt::star3(), 0.5);
  CHECK(report.kind == CentralityKind::Vertex);
  CHECK(report.values.size() == 4);
}

TEST_CASE("exact reports against the independent oracle") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 10; ++t) {
    const auto g = kt::random_graph(rng, 5 + 3 * t, t);
    const double theta = t % 2 ? 0.1 : 0.5;
    const auto c = exact_edge_centralities(g, theta, false);
    const auto d = exact_edge_centralities(g, theta, true);
    const auto v = exact_vertex_centralities(g, theta);
    const double kf = kt::oracle_kirchhoff(g);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      const double truth = kt::oracle_edge_centrality(g, e, theta);
      CHECK(kt::close(c.values[static_cast<std::size_t>(e)], truth, 1e-9));
      CHECK(std::abs(d.values[static_cast<std::size_t>(e)] - (truth - kf)) <= 1e-9 * kf);
      CHECK(d.values[static_cast<std::size_t>(e)] >= -1e-9);
    }
    for (Vertex x = 0; x < g.num_vertices(); ++x) {
      CHECK(std::abs(v.values[static_cast<std::size_t>(x)] - kt::oracle_vertex_delta(g, x, theta)) <= 1e-9 * kf);
    }
  }
}

TEST_CASE("betweenness examples") {
  const auto p3 = edge_betweenness(kt::p3()).values;
  CHECK(p3[0] == doctest::Approx(2.0));
  CHECK(p3[1] == doctest::Approx(2.0));
  for (double b : edge_betweenness(kt::triangle()).values) CHECK(b == doctest::Approx(1.0));
  CHECK(edge_betweenness(kt::k2()).values[0] == doctest::Approx(1.0));
  // A 4-cycle: opposite vertices have two tied shortest paths.
  const auto c4 = edge_betweenness(kt::from_list({{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 1}})).values;
  for (double b : c4) CHECK(b == doctest::Approx(2.0));
}

TEST_CASE("betweenness against path counting") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 30; ++t) {
    // Integer weights produce many ties.
    auto g = kt::random_graph(rng, 4 + t % 20, t % 9, 1.0, 1.0);
    if (t % 3 == 0) g = kt::random_graph(rng, 4 + t % 20, t % 9, 1.0, 10.0);
    const auto fast = edge_betweenness(g).values;
    const auto slow = brute_betweenness(g);
    for (std::size_t e = 0; e < fast.size(); ++e) CHECK(fast[e] == doctest::Approx(slow[e]).epsilon(1e-9));
  }
}

TEST_CASE("spanning edge centrality") {
  CHECK(spanning_edge_centrality(kt::k2()).values[0] == doctest::Approx(1.0));
  for (double s : spanning_edge_centrality(kt::p3()).values) CHECK(s == doctest::Approx(1.0));
  for (double s : spanning_edge_centrality(kt::triangle()).values) CHECK(s == doctest::Approx(2.0 / 3.0));
  std::mt19937_64 rng(44);
  for (int t = 0; t < 30; ++t) {
    const auto g = kt::random_graph(rng, 3 + t, t);
    const auto s = spanning_edge_centrality(g).values;
    double sum = 0.0;
    for (double x : s) {
      CHECK(x > 0.0);
      CHECK(x <= 1.0 + 1e-12);
      sum += x;
    }
    CHECK(std::abs(sum - (g.num_vertices() - 1)) <= 1e-8);
  }
}

TEST_CASE("current-flow edge centrality") {
  CHECK(current_flow_edge_centrality(kt::k2()).values[0] == doctest::Approx(1.0));
  for (double c : current_flow_edge_centrality(kt::triangle()).values) CHECK(c == doctest::Approx(4.0 / 9.0));
  for (double c : current_flow_edge_centrality(kt::p3()).values) CHECK(c == doctest::Approx(2.0 / 3.0));
  std::mt19937_64 rng(45);
  for (int t = 0; t < 10; ++t) {
    const auto g = kt::random_graph(rng, 4 + t, t);
    const Eigen::MatrixXd P = kt::oracle_pinv(g);
    const auto fast = current_flow_edge_centrality(g).values;
    const Vertex n = g.num_vertices();
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      const Edge& ed = g.edge(e);
      double sum = 0.0;
      for (Vertex s = 0; s < n; ++s)
        for (Vertex x = s + 1; x < n; ++x)
          sum += ed.weight * std::abs(P(ed.u, s) - P(ed.u, x) - P(ed.v, s) + P(ed.v, x));
      CHECK(fast[static_cast<std::size_t>(e)] == doctest::Approx(sum / (n * (n - 1) / 2.0)).epsilon(1e-9));
    }
  }
}

TEST_CASE("relative standard deviation") {
  const std::vector<double> flat{1, 1, 1};
  const std::vector<double> a{0, 2};
  const std::vector<double> b{1, 3};
  CHECK(relative_std_dev(flat) == doctest::Approx(0.0));
  CHECK(relative_std_dev(a) == doctest::Approx(1.0));
  CHECK(relative_std_dev(b) == doctest::Approx(0.5));
  CHECK(code_of([] { relative_std_dev(std::vector<double>{}); }) == ErrorCode::EmptyInput);
  CHECK(code_of([] { relative_std_dev(std::vector<double>{-1, 1}); }) == ErrorCode::ZeroMean);
}

TEST_CASE("Kirchhoff index never decreases under theta-deletion") {
  std::mt19937_64 rng(46);
  for (int t = 0; t < 20; ++t) {
    const auto g = kt::random_graph(rng, 4 + t, t + 3);
    const double kf = kirchhoff_index(g);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      CHECK(exact_edge_centrality(g, e, 0.1 + 0.02 * t) >= kf - 1e-9);
    }
  }
}

TEST_CASE("edge centrality decreases as theta grows") {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 10; ++t) {
    const auto g = kt::random_graph(rng, 5 + t, t);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      double previous = std::numeric_limits<double>::infinity();
      for (double theta : {0.01, 0.05, 0.1, 0.25, 0.5}) {
        const double c = exact_edge_centrality(g, e, theta);
        CHECK(c <= previous + 1e-9 * c);
        previous = c;
      }
    }
  }
}

TEST_CASE("rank-one update formula matches the deleted pseudoinverse") {
  std::mt19937_64 rng(48);
  for (int t = 0; t < 20; ++t) {
    const auto g = kt::random_graph(rng, 3 + t, t % 8);
    const double theta = t % 2 ? 0.1 : 0.5;
    const Eigen::MatrixXd P = kt::oracle_pinv(g);
    const auto n = static_cast<double>(g.num_vertices());
    const double kf = kt::oracle_kirchhoff(g);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      const Edge& ed = g.edge(e);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(g.num_vertices());
      b(ed.u) = 1.0;
      b(ed.v) = -1.0;
      const Eigen::VectorXd Pb = P * b;
      const double den = 1.0 - (1.0 - theta) * ed.weight * b.dot(Pb);
      const Eigen::MatrixXd updated = P + (1.0 - theta) * ed.weight * Pb * Pb.transpose() / den;
      const EdgeId ids[] = {e};
      CHECK((updated - kt::oracle_pinv(theta_delete(g, ids, theta))).cwiseAbs().maxCoeff() <= 1e-8);
      const double delta = n * (1.0 - theta) * ed.weight * Pb.squaredNorm() / den;
      CHECK(std::abs(delta - exact_edge_centrality_delta(g, e, theta)) <= 1e-8 * std::max(1.0, kf));
    }
  }
}

TEST_CASE("block update formula matches the deleted pseudoinverse") {
  std::mt19937_64 rng(49);
  for (int t = 0; t < 20; ++t) {
    const auto g = kt::random_graph(rng, 6 + t, 4 + t % 6);
    const double theta = t % 2 ? 0.1 : 0.5;
    std::vector<EdgeId> T;
    for (EdgeId e = t % 3; e < g.num_edges() && T.size() < 1 + static_cast<std::size_t>(t % 5); e += 2) T.push_back(e);
    const auto block = incidence_block(g, T);
    const Eigen::MatrixXd B = block.matrix;
    const Eigen::MatrixXd WB = block.weights.cwiseSqrt().asDiagonal() * B;
    const Eigen::MatrixXd P = kt::oracle_pinv(g);
    const Eigen::MatrixXd M =
        Eigen::MatrixXd::Identity(block.size(), block.size()) - (1.0 - theta) * WB * P * WB.transpose();
    const Eigen::MatrixXd updated = P + (1.0 - theta) * P * WB.transpose() * M.inverse() * WB * P;
    CHECK((updated - kt::oracle_pinv(theta_delete(g, T, theta))).cwiseAbs().maxCoeff() <= 1e-8);
    const double n = g.num_vertices();
    const double delta = n * (1.0 - theta) * (P * WB.transpose() * M.inverse() * WB * P).trace();
    const double kf = kt::oracle_kirchhoff(g);
    CHECK(std::abs(delta - (kt::oracle_kirchhoff(theta_delete(g, T, theta)) - kf)) <= 1e-8 * std::max(1.0, kf));
  }
}

TEST_CASE("C_theta and C_theta^Delta rank edges identically") {
  std::mt19937_64 rng(50);
  for (int t = 0; t < 20; ++t) {
    const auto g = kt::random_graph(rng, 5 + t, t);
    const auto c = exact_edge_centralities(g, 0.1, false).values;
    const auto d = exact_edge_centralities(g, 0.1, true).values;
    for (std::size_t a = 0; a < c.size(); ++a) {
      for (std::size_t b = 0; b < c.size(); ++b) {
        if (c[a] < c[b]) CHECK(d[a] <= d[b]);
      }
    }
  }
}
