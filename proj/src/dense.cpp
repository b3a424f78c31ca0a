#include "kcent/dense.hpp"

#include <cmath>
#include <string>

#include "kcent/error.hpp"

namespace kcent {

DenseOperator::DenseOperator(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) fail(ErrorCode::DimensionMismatch, "dense operator must be square");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    fail(ErrorCode::InvalidArgument, "dense operator must be symmetric");
  }
}

Eigen::MatrixXd dense_laplacian_pinv(const Eigen::MatrixXd& L) {
  const Eigen::Index n = L.rows();
  if (n == 1) return Eigen::MatrixXd::Zero(1, 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double scale = std::max(std::abs(lambda(n - 1)), 1e-300);
  if (lambda(1) <= 1e-12 * scale) fail(ErrorCode::Disconnected, "second eigenvalue vanishes; graph is disconnected");
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 1; i < n; ++i) inv(i) = 1.0 / lambda(i);
  const Eigen::MatrixXd& v = eig.eigenvectors();
  Eigen::MatrixXd pinv = v * inv.asDiagonal() * v.transpose();
  return 0.5 * (pinv + pinv.transpose());
}

DenseOperator dense_pseudoinverse(const Laplacian& L, Eigen::Index cap) {
  if (L.dimension() > cap) {
    fail(ErrorCode::DimensionCap,
         "dimension " + std::to_string(L.dimension()) + " exceeds dense cap " + std::to_string(cap));
  }
  if (L.dimension() == 0) fail(ErrorCode::EmptyGraph, "empty Laplacian");
  return DenseOperator(dense_laplacian_pinv(L.dense()));
}

}  // namespace kcent
