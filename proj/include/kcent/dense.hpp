#pragma once

#include <Eigen/Dense>

#include "kcent/graph.hpp"

namespace kcent {

/// Dense symmetric matrix, used for exact oracles on small graphs.
class DenseOperator {
 public:
  DenseOperator() = default;
  explicit DenseOperator(Eigen::MatrixXd m);

  const Eigen::MatrixXd& matrix() const { return m_; }
  Eigen::Index dimension() const { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }
  double quadratic_form(const Eigen::VectorXd& x) const { return x.dot(m_ * x); }

 private:
  Eigen::MatrixXd m_;
};

inline constexpr Eigen::Index kDefaultDenseCap = 2000;

/// Moore-Penrose pseudoinverse of a connected graph's Laplacian through a
/// dense symmetric eigendecomposition.
DenseOperator dense_pseudoinverse(const Laplacian& L, Eigen::Index cap = kDefaultDenseCap);

/// Same, for a dense Laplacian-like matrix whose kernel is exactly span(1).
Eigen::MatrixXd dense_laplacian_pinv(const Eigen::MatrixXd& L);

}  // namespace kcent
