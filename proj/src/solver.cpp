#include "kcent/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "kcent/error.hpp"

namespace kcent {

void SolveContract::validate() const {
  require_theta(theta);
  require_epsilon(epsilon);
  if (!(delta > 0.0)) fail(ErrorCode::InvalidArgument, "delta must be positive");
  if (samples < 1) fail(ErrorCode::InvalidArgument, "sample count must be at least 1");
  if (!(weight_ratio >= 1.0)) fail(ErrorCode::InvalidArgument, "weight ratio U must be >= 1");
}

EigenBounds eigen_bounds(const Laplacian& L, double U) {
  if (!(U >= 1.0)) fail(ErrorCode::WeightsOutOfRange, "U must be at least 1");
  const double slack = 1e-12 * U;
  for (const Edge& e : L.edges()) {
    if (e.weight < 1.0 - slack || e.weight > U + slack) {
      fail(ErrorCode::WeightsOutOfRange, "edge weight " + std::to_string(e.weight) + " outside [1, U]");
    }
  }
  const double n = static_cast<double>(L.dimension());
  return EigenBounds{1.0 / (2.0 * std::pow(n, 4) * U * U), n * U};
}

LaplacianSolver::LaplacianSolver(Laplacian L, const SolverOptions& options) : L_(std::move(L)), options_(options) {
  const Eigen::Index n = L_.dimension();
  if (n == 0) fail(ErrorCode::EmptyGraph, "empty Laplacian");
  const auto edges = L_.edges();
  if (n > 1 && edges.empty()) fail(ErrorCode::Disconnected, "Laplacian has no edges");
  if (n > 1) {
    double lo = edges.front().weight;
    double hi = lo;
    for (const Edge& e : edges) {
      lo = std::min(lo, e.weight);
      hi = std::max(hi, e.weight);
    }
    const double U = hi / lo;
    const double nn = static_cast<double>(n);
    // Bounds for L / lo, whose weights lie in [1, U]; the ratio is scale free.
    spectral_ratio_ = (1.0 / (2.0 * std::pow(nn, 4) * U * U)) / (nn * U);
  }
  std::mt19937_64 rng(options_.seed);
  const Vertex root[] = {0};
  // Elimination reports Disconnected when some vertex cannot reach the root.
  preconditioner_ = apx_partial_cholesky(L_, root, options_.preconditioner_epsilon, rng, options_.elimination);
}

double LaplacianSolver::residual_target(double delta) const {
  if (!(delta > 0.0)) fail(ErrorCode::InvalidArgument, "delta must be positive");
  // ||y - L^+z||_L = ||r||_{L^+} <= ||r|| / sqrt(l2) and ||L^+z||_L >= ||z|| / sqrt(ln).
  return std::max(delta * std::sqrt(spectral_ratio_), options_.residual_floor);
}

std::size_t LaplacianSolver::iteration_cap(double delta) const {
  const double target = residual_target(delta);
  const double kappa = 1.0 / spectral_ratio_;
  const double cg_bound = 0.5 * std::sqrt(kappa) * std::log(2.0 / target) + 1.0;
  const double dimension_bound = 10.0 * static_cast<double>(L_.dimension()) + 100.0;
  return static_cast<std::size_t>(std::min(cg_bound, dimension_bound));
}

Eigen::VectorXd LaplacianSolver::solve(const Eigen::VectorXd& z, double delta) const {
  if (z.size() != L_.dimension()) fail(ErrorCode::DimensionMismatch, "right-hand side size mismatch");
  RowBlock block = z;
  solve_inplace(block, delta);
  return block.col(0);
}

void LaplacianSolver::solve_inplace(RowBlock& block, double delta) const {
  if (block.rows() != L_.dimension()) fail(ErrorCode::DimensionMismatch, "right-hand side size mismatch");
  const Eigen::Index k = block.cols();
  if (k == 0) return;
  project_out_constant(block);
  if (L_.dimension() == 1) return;

  const double rel = residual_target(delta);
  const Eigen::RowVectorXd threshold = rel * block.colwise().norm();
  const std::size_t cap = iteration_cap(delta);
  const auto& A = L_.matrix();

  RowBlock rhs = block;
  RowBlock x = block;
  apply_complete_pseudo_inverse_inplace(preconditioner_, x);
  RowBlock r = rhs - A * x;
  project_out_constant(r);

  auto converged = [&](Eigen::RowVectorXd& norms) {
    norms = r.colwise().norm();
    return (norms.array() <= threshold.array()).all();
  };
  Eigen::RowVectorXd norms;
  if (converged(norms)) {
    block = std::move(x);
    return;
  }

  RowBlock z = r;
  apply_complete_pseudo_inverse_inplace(preconditioner_, z);
  RowBlock p = z;
  Eigen::RowVectorXd rz = r.cwiseProduct(z).colwise().sum();
  RowBlock q(r.rows(), k);
  for (std::size_t it = 0; it < cap; ++it) {
    q.noalias() = A * p;
    const Eigen::RowVectorXd pq = p.cwiseProduct(q).colwise().sum();
    Eigen::RowVectorXd alpha = Eigen::RowVectorXd::Zero(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      if (norms(j) > threshold(j) && pq(j) > 0.0) alpha(j) = rz(j) / pq(j);
    }
    x += p * alpha.asDiagonal();
    r -= q * alpha.asDiagonal();
    project_out_constant(r);
    if (converged(norms)) {
      project_out_constant(x);
      block = std::move(x);
      return;
    }
    z = r;
    apply_complete_pseudo_inverse_inplace(preconditioner_, z);
    const Eigen::RowVectorXd rz_next = r.cwiseProduct(z).colwise().sum();
    Eigen::RowVectorXd beta = Eigen::RowVectorXd::Zero(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      if (rz(j) > 0.0) beta(j) = rz_next(j) / rz(j);
    }
    p = z + p * beta.asDiagonal();
    rz = rz_next;
  }
  fail(ErrorCode::NoConvergence, "conjugate gradient hit its iteration cap of " + std::to_string(cap));
}

Eigen::VectorXd lapl_solve(const Laplacian& L, const Eigen::VectorXd& z, double delta) {
  return LaplacianSolver(L).solve(z, delta);
}

std::size_t chebyshev_iterations(double kappa, double epsilon) {
  if (!(kappa >= 1.0)) fail(ErrorCode::BadSpectrumBound, "kappa must be at least 1");
  if (!(epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (kappa <= 1.0 + 1e-12) return 1;
  const double eta = 1.0 - std::exp(-epsilon);
  const double sigma = (kappa + 1.0) / (kappa - 1.0);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(std::acosh(1.0 / eta) / std::acosh(sigma))));
}

namespace {

// Chebyshev acceleration on the interval [1/kappa, 1], applied to every column
// of B at once. Fails when a residual outgrows the bound the interval implies.
template <class ApplyP>
Eigen::MatrixXd chebyshev_block(ApplyP&& apply_P, double kappa, double epsilon, const Eigen::MatrixXd& B) {
  const std::size_t steps = chebyshev_iterations(kappa, epsilon);
  const Eigen::RowVectorXd b_norm = B.colwise().norm();

  const double lo = 1.0 / kappa;
  const double hi = 1.0;
  const double center = 0.5 * (hi + lo);
  const double half_width = 0.5 * (hi - lo);

  auto check = [&](const Eigen::MatrixXd& R, double bound) {
    const Eigen::RowVectorXd norms = R.colwise().norm();
    for (Eigen::Index j = 0; j < norms.size(); ++j) {
      if (!std::isfinite(norms(j)) || norms(j) > (bound * (1.0 + 1e-6) + 1e-12) * b_norm(j)) {
        fail(ErrorCode::BadSpectrumBound, "Chebyshev residual exceeds its bound; spectrum is outside [1/kappa, 1]");
      }
    }
  };

  if (half_width <= 1e-12 * center) {
    Eigen::MatrixXd X = B / center;
    check(B - apply_P(X), 1.0 - std::exp(-epsilon));
    return X;
  }

  const double sigma = center / half_width;
  double rho = 1.0 / sigma;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(B.rows(), B.cols());
  Eigen::MatrixXd R = B;
  Eigen::MatrixXd D = R / center;
  for (std::size_t k = 0; k < steps; ++k) {
    X += D;
    R -= apply_P(D);
    check(R, 1.0 / std::cosh(static_cast<double>(k + 1) * std::acosh(sigma)));
    const double rho_next = 1.0 / (2.0 * sigma - rho);
    D = (rho_next * rho) * D + (2.0 * rho_next / half_width) * R;
    rho = rho_next;
  }
  return X;
}

}  // namespace

Eigen::VectorXd cheb_solve(const LinearOperator& apply_P, double kappa, double epsilon, const Eigen::VectorXd& b) {
  if (b.norm() == 0.0) {
    chebyshev_iterations(kappa, epsilon);
    return Eigen::VectorXd::Zero(b.size());
  }
  const Eigen::MatrixXd x = chebyshev_block(
      [&](const Eigen::MatrixXd& d) -> Eigen::MatrixXd { return apply_P(d.col(0)); }, kappa, epsilon, b);
  return x.col(0);
}

Eigen::MatrixXd chebyshev_operator(const Eigen::MatrixXd& P, double kappa, double epsilon) {
  if (P.rows() != P.cols()) fail(ErrorCode::DimensionMismatch, "operator must be square");
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(P.rows(), P.cols());
  return chebyshev_block([&](const Eigen::MatrixXd& d) -> Eigen::MatrixXd { return P * d; }, kappa, epsilon, I);
}

}  // namespace kcent
