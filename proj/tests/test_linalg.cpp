#include <doctest.h>

#include <numeric>

#include "kcent/cholesky.hpp"
#include "kcent/dense.hpp"
#include "kcent/error.hpp"
#include "kcent/solver.hpp"
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

EliminationOptions sampled() {
  EliminationOptions o;
  o.exact_fallback = false;
  o.exact_below = 0;
  return o;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<Vertex> every(Vertex n, Vertex step, Vertex offset = 0) {
  std::vector<Vertex> out;
  for (Vertex v = offset; v < n; v += step) out.push_back(v);
  return out;
}

}  // namespace

TEST_CASE("dense pseudoinverse examples") {
  const auto Lk2 = laplacian(kt::k2());
  CHECK(dense_pseudoinverse(Lk2).matrix().isApprox(Lk2.dense() / 4.0));
  CHECK(dense_pseudoinverse(laplacian(kt::triangle())).trace() == doctest::Approx(2.0 / 3.0));
  CHECK(dense_pseudoinverse(laplacian(kt::star3())).trace() == doctest::Approx(2.25));
}

TEST_CASE("dense pseudoinverse projects onto 1-perp") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const auto g = kt::random_graph(rng, 5 + t, t);
    const auto L = laplacian(g);
    const Eigen::MatrixXd P = dense_pseudoinverse(L).matrix();
    const auto n = L.dimension();
    const Eigen::MatrixXd Pi =
        Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    CHECK(max_abs(L.dense() * P - Pi) <= 1e-8);
    CHECK(max_abs(P - kt::oracle_pinv(g)) <= 1e-8);
  }
}

TEST_CASE("dense pseudoinverse errors") {
  const auto L = laplacian(kt::triangle());
  CHECK(code_of([&] { dense_pseudoinverse(L, 2); }) == ErrorCode::DimensionCap);
  const std::vector<Edge> two{{0, 1, 1.0}, {2, 3, 1.0}};
  CHECK(code_of([&] { dense_pseudoinverse(laplacian(build_graph(two))); }) == ErrorCode::Disconnected);
}

TEST_CASE("exact Schur complement examples") {
  const Vertex ends[] = {0, 2};
  const auto p3 = exact_schur(laplacian(kt::p3()), ends);
  REQUIRE(p3.dimension() == 2);
  CHECK(-p3.matrix().coeff(0, 1) == doctest::Approx(0.5));

  const Vertex leaves[] = {1, 2, 3};
  const auto star = exact_schur(laplacian(kt::star3()), leaves);
  Eigen::Matrix3d tri;
  tri << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  CHECK(max_abs(star.dense() - tri / 3.0) <= 1e-12);

  // Eliminating a pendant vertex leaves the rest unchanged.
  const auto g = kt::from_list({{0, 1, 2.0}, {1, 2, 3.0}, {0, 2, 1.5}, {2, 3, 4.0}});
  const Vertex keep[] = {0, 1, 2};
  const auto s = exact_schur(laplacian(g), keep);
  const auto base = laplacian(kt::from_list({{0, 1, 2.0}, {1, 2, 3.0}, {0, 2, 1.5}}));
  CHECK(max_abs(s.dense() - base.dense()) <= 1e-12);

  CHECK(code_of([&] { exact_schur(laplacian(kt::p3()), {}); }) == ErrorCode::EmptyRetainSet);
}

TEST_CASE("exact partial Cholesky examples") {
  const Vertex ends[] = {0, 2};
  const auto p3 = exact_partial_cholesky(laplacian(kt::p3()), ends);
  REQUIRE(p3.pivots.size() == 1);
  CHECK(p3.pivots[0] == doctest::Approx(2.0));
  CHECK(-p3.schur.matrix().coeff(0, 1) == doctest::Approx(0.5));

  const Vertex both[] = {0, 1};
  const auto k2 = exact_partial_cholesky(laplacian(kt::k2()), both);
  CHECK(k2.eliminated.empty());
  CHECK(k2.lower_factor().isIdentity());
  CHECK(k2.schur.dense().isApprox(laplacian(kt::k2()).dense()));

  const Vertex leaves[] = {1, 2, 3};
  const auto star = exact_partial_cholesky(laplacian(kt::star3()), leaves);
  REQUIRE(star.pivots.size() == 1);
  CHECK(star.pivots[0] == doctest::Approx(3.0));
}

TEST_CASE("exact partial Cholesky reassembles L") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 30; ++t) {
    const auto g = kt::random_graph(rng, 6 + t, 2 * t);
    const auto L = laplacian(g);
    const auto C = every(g.num_vertices(), 3, t % 3);
    const auto pc = exact_partial_cholesky(L, C);
    const double scale = max_abs(L.dense());
    CHECK(max_abs(pc.reassemble() - L.dense()) <= 1e-9 * scale);
    for (double p : pc.pivots) CHECK(p > 0.0);
    const Eigen::MatrixXd S = pc.schur.dense();
    CHECK(S.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-9 * scale);
  }
}

TEST_CASE("Schur complement is independent of elimination order") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const Vertex n = 8 + t % 23;
    const auto g = kt::random_graph(rng, n, n);
    const auto L = laplacian(g);
    const auto C = every(n, 4, t % 4);
    std::vector<Vertex> F;
    for (Vertex v = 0; v < n; ++v) {
      if (std::find(C.begin(), C.end(), v) == C.end()) F.push_back(v);
    }
    const Eigen::MatrixXd reference = exact_schur(L, C).dense();
    for (int k = 0; k < 5; ++k) {
      std::shuffle(F.begin(), F.end(), rng);
      CHECK(max_abs(exact_schur(L, C, F).dense() - reference) <= 1e-9 * max_abs(reference));
    }
  }
}

TEST_CASE("elimination order must be a permutation of V minus C") {
  const Vertex C[] = {0};
  const Vertex bad[] = {1, 1, 2};
  CHECK(code_of([&] { exact_schur(laplacian(kt::star3()), C, bad); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Schur complement commutes with theta-deletion inside C") {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 20; ++t) {
    const Vertex n = 6 + t;
    const auto g = kt::random_graph(rng, n, n + 5);
    const auto C = every(n, 2, 0);
    const double theta = t % 2 ? 0.1 : 0.5;
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      const Edge& ed = g.edge(e);
      if (ed.u % 2 || ed.v % 2) continue;
      const EdgeId ids[] = {e};
      const Eigen::MatrixXd lhs = exact_schur(laplacian(theta_delete(g, ids, theta)), C).dense();
      Eigen::MatrixXd rhs = exact_schur(laplacian(g), C).dense();
      const Eigen::Index a = ed.u / 2;
      const Eigen::Index b = ed.v / 2;
      const double d = (1.0 - theta) * ed.weight;
      rhs(a, a) -= d;
      rhs(b, b) -= d;
      rhs(a, b) += d;
      rhs(b, a) += d;
      CHECK(max_abs(lhs - rhs) <= 1e-9 * std::max(1.0, max_abs(rhs)));
    }
  }
}

TEST_CASE("pseudoinverse restricted to C is the pseudoinverse of the Schur complement") {
  std::mt19937_64 rng(25);
  for (int t = 0; t < 20; ++t) {
    const Vertex n = 5 + t;
    const auto g = kt::random_graph(rng, n, t);
    const auto C = every(n, 2, 1);
    const Eigen::MatrixXd P = kt::oracle_pinv(g);
    const auto c = static_cast<Eigen::Index>(C.size());
    Eigen::MatrixXd PCC(c, c);
    for (Eigen::Index i = 0; i < c; ++i) {
      for (Eigen::Index j = 0; j < c; ++j) PCC(i, j) = P(C[static_cast<std::size_t>(i)], C[static_cast<std::size_t>(j)]);
    }
    // (L^+)_CC agrees with Sc^+ on 1-perp of C.
    const Eigen::MatrixXd J =
        Eigen::MatrixXd::Identity(c, c) - Eigen::MatrixXd::Constant(c, c, 1.0 / static_cast<double>(c));
    const Eigen::MatrixXd S = kt::oracle_pinv(exact_schur(laplacian(g), C).dense());
    CHECK(max_abs(J * PCC * J - S) <= 1e-8);
  }
}

TEST_CASE("approximate partial Cholesky with C = V is exact") {
  std::mt19937_64 rng(26);
  const auto g = kt::random_graph(rng, 12, 10);
  const auto L = laplacian(g);
  const auto all = every(12, 1);
  const auto pc = apx_partial_cholesky(L, all, 0.3, rng, sampled());
  CHECK(pc.eliminated.empty());
  CHECK(pc.factor_nonzeros() == 0);
  CHECK(max_abs(pc.schur.dense() - L.dense()) == 0.0);
}

TEST_CASE("approximate partial Cholesky on a path") {
  std::mt19937_64 rng(27);
  const Vertex ends[] = {0, 2};
  for (int t = 0; t < 50; ++t) {
    const auto pc = apx_partial_cholesky(laplacian(kt::p3()), ends, 0.3, rng, sampled());
    CHECK(kt::within(-pc.schur.matrix().coeff(0, 1), 0.5, 0.3));
  }
}

TEST_CASE("approximate partial Cholesky spectral sandwich at n = 30") {
  std::mt19937_64 rng(28);
  for (int t = 0; t < 10; ++t) {
    const auto g = kt::random_graph(rng, 30, 40);
    const auto L = laplacian(g);
    const auto C = every(30, 3, t % 3);
    const auto pc = apx_partial_cholesky(L, C, 0.25, rng, sampled());
    CHECK_FALSE(pc.exact);
    const Eigen::MatrixXd exact = exact_schur(L, C).dense();
    const Eigen::MatrixXd approx = pc.schur.dense();
    std::normal_distribution<double> normal;
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd x(exact.rows());
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
      const double a = x.dot(exact * x);
      const double b = x.dot(approx * x);
      CHECK(b >= std::exp(-0.25) * a);
      CHECK(b <= std::exp(0.25) * a);
    }
    const auto [lo, hi] = kt::relative_spectrum(pc.reassemble(), L.dense());
    CHECK(lo >= std::exp(-0.25));
    CHECK(hi <= std::exp(0.25));
  }
}

TEST_CASE("adding an edge inside C preserves the approximation") {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 10; ++t) {
    const auto g = kt::random_graph(rng, 30, 30);
    const auto C = every(30, 2, 0);
    auto edges = std::vector<Edge>(g.edges().begin(), g.edges().end());
    const auto L = laplacian(g);
    const auto pc = apx_partial_cholesky(L, C, 0.25, rng, sampled());
    // New conductance between two retained vertices, added on both sides.
    const Edge extra{C[1], C[C.size() - 2], 3.0};
    edges.push_back(extra);
    const auto L2 = Laplacian::from_edges(30, edges);
    auto s_edges = pc.schur.edges();
    s_edges.push_back(Edge{1, static_cast<Vertex>(C.size() - 2), 3.0});
    PartialCholesky bumped = pc;
    bumped.schur = Laplacian::from_edges(static_cast<Eigen::Index>(C.size()), s_edges);
    const auto [lo, hi] = kt::relative_spectrum(bumped.reassemble(), L2.dense());
    CHECK(lo >= std::exp(-0.25));
    CHECK(hi <= std::exp(0.25));
  }
}

TEST_CASE("approximate partial Cholesky validates epsilon") {
  std::mt19937_64 rng(30);
  const Vertex ends[] = {0, 2};
  CHECK(code_of([&] { apx_partial_cholesky(laplacian(kt::p3()), ends, 0.7, rng); }) == ErrorCode::EpsilonOutOfRange);
  CHECK(code_of([&] { apx_partial_cholesky(laplacian(kt::p3()), ends, -0.1, rng); }) == ErrorCode::EpsilonOutOfRange);
}

TEST_CASE("apply_factor_inverse") {
  const auto L = laplacian(kt::p3());
  const auto all = every(3, 1);
  const auto identity = exact_partial_cholesky(L, all);
  const Eigen::Vector3d b(0.3, -1.0, 2.0);
  CHECK(apply_factor_inverse(identity, b).isApprox(b));

  const Vertex ends[] = {0, 2};
  const auto pc = exact_partial_cholesky(L, ends);
  const Eigen::Vector3d ones(1, 1, 1);
  const Eigen::VectorXd dense = pc.lower_factor().partialPivLu().solve(Eigen::VectorXd(ones));
  CHECK(apply_factor_inverse(pc, ones).isApprox(dense));

  const Vertex leaves[] = {1, 2, 3};
  const auto star = exact_partial_cholesky(laplacian(kt::star3()), leaves);
  const Eigen::Vector4d r(0.5, -2.0, 1.25, 3.0);
  CHECK((star.lower_factor() * apply_factor_inverse(star, r)).isApprox(Eigen::VectorXd(r)));

  CHECK(code_of([&] { apply_factor_inverse(pc, Eigen::VectorXd::Ones(5)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("eigen bounds examples") {
  const auto k2 = eigen_bounds(laplacian(kt::k2()), 1.0);
  CHECK(k2.lambda2_lower == doctest::Approx(1.0 / 32.0));
  CHECK(k2.lambdan_upper == doctest::Approx(2.0));
  const auto p3 = eigen_bounds(laplacian(kt::p3()), 1.0);
  CHECK(p3.lambda2_lower == doctest::Approx(1.0 / 162.0));
  CHECK(p3.lambdan_upper == doctest::Approx(3.0));
  CHECK(p3.lambda2_lower <= 1.0);
  const auto tri = eigen_bounds(laplacian(kt::triangle()), 1.0);
  CHECK(tri.lambda2_lower <= 3.0);
  CHECK(tri.lambdan_upper >= 3.0);
  CHECK(code_of([] { eigen_bounds(laplacian(kt::from_list({{0, 1, 0.5}})), 1.0); }) == ErrorCode::WeightsOutOfRange);
}

TEST_CASE("eigen bounds hold on random graphs") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 50; ++t) {
    const double U = 1.0 + t;
    const auto g = kt::random_graph(rng, 3 + t % 30, t % 11, 1.0, U);
    const auto L = laplacian(g);
    const auto bounds = eigen_bounds(L, U);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L.dense());
    CHECK(es.eigenvalues()(1) >= bounds.lambda2_lower);
    CHECK(es.eigenvalues()(es.eigenvalues().size() - 1) <= bounds.lambdan_upper * (1 + 1e-12));
  }
}

TEST_CASE("lapl_solve examples") {
  const auto k2 = lapl_solve(laplacian(kt::k2()), Eigen::Vector2d(1, -1), 1e-10);
  CHECK(k2(0) == doctest::Approx(0.5));
  CHECK(k2(1) == doctest::Approx(-0.5));

  const Eigen::Vector3d z(1, 0, -1);
  const auto p3 = lapl_solve(laplacian(kt::p3()), z, 1e-8);
  const Eigen::VectorXd dense = kt::oracle_pinv(kt::p3()) * z;
  CHECK((p3 - dense).norm() <= 1e-8 * dense.norm());

  std::mt19937_64 rng(32);
  const auto g = kt::random_graph(rng, 20, 10);
  CHECK(lapl_solve(laplacian(g), Eigen::VectorXd::Ones(20), 1e-8).norm() <= 1e-12);
}

TEST_CASE("lapl_solve meets its L-norm contract") {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> normal;
  SolverOptions loose;
  loose.elimination = sampled();  // approximate preconditioner
  for (int t = 0; t < 100; ++t) {
    const Vertex n = 5 + t % 60;
    const auto g = kt::random_graph(rng, n, n / 2 + t % 7);
    const auto L = laplacian(g);
    Eigen::VectorXd z(n);
    for (Vertex i = 0; i < n; ++i) z(i) = normal(rng);
    z.array() -= z.mean();
    const double delta = std::pow(10.0, -2.0 - t % 7);
    const LaplacianSolver solver(L, t % 2 ? loose : SolverOptions{});
    const Eigen::VectorXd y = solver.solve(z, delta);
    const Eigen::VectorXd x = kt::oracle_pinv(g) * z;
    const Eigen::VectorXd err = y - x;
    const double lhs = std::sqrt(err.dot(L.apply(err)));
    const double rhs = delta * std::sqrt(x.dot(L.apply(x)));
    CHECK(lhs <= rhs + 1e-12 * std::sqrt(x.dot(L.apply(x))));
    CHECK(std::abs(y.sum()) <= 1e-9 * y.norm());
  }
}

TEST_CASE("lapl_solve rejects disconnected graphs") {
  const std::vector<Edge> two{{0, 1, 1.0}, {2, 3, 1.0}};
  CHECK(code_of([&] { lapl_solve(laplacian(build_graph(two)), Eigen::Vector4d(1, -1, 0, 0), 1e-6); }) ==
        ErrorCode::Disconnected);
}

TEST_CASE("cheb_solve examples") {
  const Eigen::Vector3d b(1.0, -2.0, 0.5);
  const LinearOperator identity = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; };
  CHECK(cheb_solve(identity, 1.0, 0.1, b).isApprox(Eigen::VectorXd(b)));

  const LinearOperator half = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 0.5 * x; };
  const Eigen::VectorXd x = cheb_solve(half, 2.0, 0.1, b);
  const double form = b.dot(x);
  CHECK(kt::within(form, 2.0 * b.squaredNorm(), 0.1));

  const Eigen::Vector2d d(1.0, 0.25);
  const LinearOperator diag = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return d.cwiseProduct(v); };
  const Eigen::Vector2d rhs(3.0, -1.0);
  const Eigen::VectorXd y = cheb_solve(diag, 4.0, 1e-6, rhs);
  CHECK(y(0) == doctest::Approx(3.0).epsilon(1e-5));
  CHECK(y(1) == doctest::Approx(-4.0).epsilon(1e-5));
}

TEST_CASE("cheb_solve detects a spectrum outside its interval") {
  const LinearOperator small = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 0.01 * x; };
  CHECK(code_of([&] { cheb_solve(small, 2.0, 1e-3, Eigen::Vector2d(1, 1)); }) == ErrorCode::BadSpectrumBound);
  const LinearOperator large = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 3.0 * x; };
  CHECK(code_of([&] { cheb_solve(large, 4.0, 1e-3, Eigen::Vector2d(1, 1)); }) == ErrorCode::BadSpectrumBound);
}

TEST_CASE("realized Chebyshev operator approximates the inverse") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const double kappa = 2.0 + 20.0 * unit(rng);
    const Eigen::Index d = 2 + t % 6;
    const Eigen::MatrixXd R = Eigen::MatrixXd::Random(d, d);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(R);
    const Eigen::MatrixXd Q = qr.householderQ();
    Eigen::VectorXd spectrum(d);
    for (Eigen::Index i = 0; i < d; ++i) spectrum(i) = 1.0 / kappa + (1.0 - 1.0 / kappa) * unit(rng);
    const Eigen::MatrixXd P = Q * spectrum.asDiagonal() * Q.transpose();
    const double eps = 0.05 + 0.2 * unit(rng);
    const Eigen::MatrixXd Z = chebyshev_operator(P, kappa, eps);
    const auto [lo, hi] = [&] {
      const Eigen::MatrixXd Zs = 0.5 * (Z + Z.transpose());
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Zs, Eigen::MatrixXd(P.inverse()));
      return std::pair{es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
    }();
    CHECK(lo >= std::exp(-eps));
    CHECK(hi <= std::exp(eps));
    const Eigen::VectorXd b = Eigen::VectorXd::Random(d);
    const LinearOperator apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return P * v; };
    CHECK((cheb_solve(apply, kappa, eps, b) - Z * b).norm() <= 1e-10 * (Z * b).norm());
  }
}
