#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "kcent/cholesky.hpp"
#include "kcent/graph.hpp"

namespace kcent {

/// Tolerances threaded through the randomized estimators.
struct SolveContract {
  double delta = 1e-8;      // relative L-norm solver tolerance
  double epsilon = 0.2;     // multiplicative error target
  double theta = 0.1;       // deactivation factor
  std::size_t samples = 1;  // Monte-Carlo probe count M
  double weight_ratio = 1;  // U, max weight after rescaling to [1, U]
  std::uint64_t seed = 0;

  void validate() const;
};

/// Analytic spectrum bounds for a Laplacian with weights in [1, U]:
/// lambda_2 >= 1 / (2 n^4 U^2) and lambda_n <= n U.
struct EigenBounds {
  double lambda2_lower;
  double lambdan_upper;
};

EigenBounds eigen_bounds(const Laplacian& L, double U);

struct SolverOptions {
  /// Accuracy of the approximate complete Cholesky preconditioner.
  double preconditioner_epsilon = 0.5;
  EliminationOptions elimination{};
  std::uint64_t seed = 0x5eed;
  /// Residual targets below this relative 2-norm are clamped; double
  /// precision cannot resolve them.
  double residual_floor = 1e-13;
};

/// Preconditioned conjugate gradient for L y = z (z projected orthogonal to 1),
/// preconditioned by an approximate complete Cholesky factorization.
class LaplacianSolver {
 public:
  explicit LaplacianSolver(Laplacian L, const SolverOptions& options = {});

  Eigen::VectorXd solve(const Eigen::VectorXd& z, double delta) const;
  /// Solves every column of `block` in place.
  void solve_inplace(RowBlock& block, double delta) const;

  /// Relative 2-norm residual that certifies ||y - L^+ z||_L <= delta ||L^+ z||_L.
  double residual_target(double delta) const;
  std::size_t iteration_cap(double delta) const;
  const Laplacian& laplacian() const { return L_; }

 private:
  Laplacian L_;
  PartialCholesky preconditioner_;
  SolverOptions options_;
  double spectral_ratio_ = 1.0;  // lower bound on lambda_2 / lambda_n
};

Eigen::VectorXd lapl_solve(const Laplacian& L, const Eigen::VectorXd& z, double delta);

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Number of Chebyshev steps so that the realized operator Z satisfies
/// exp(-eps) P^-1 <= Z <= exp(eps) P^-1 whenever I/kappa <= P <= I.
std::size_t chebyshev_iterations(double kappa, double epsilon);

Eigen::VectorXd cheb_solve(const LinearOperator& apply_P, double kappa, double epsilon, const Eigen::VectorXd& b);

/// The linear map realized by cheb_solve for a dense P, as a matrix: column j
/// is cheb_solve(P, kappa, epsilon, e_j).
Eigen::MatrixXd chebyshev_operator(const Eigen::MatrixXd& P, double kappa, double epsilon);

}  // namespace kcent
