#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kcent/graph.hpp"

namespace kcent {

using RowBlock = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Tuning for randomized elimination. Each edge is split into
/// rho = ceil(sample_constant * eps^-2 * ln n) parallel copies before
/// clique sampling.
struct EliminationOptions {
  double sample_constant = 10.0;
  /// Laplacians of at most this dimension are eliminated exactly.
  Eigen::Index exact_below = 64;
  /// Also eliminate exactly when rho >= n (sampling would not save work).
  bool exact_fallback = true;
};

/// L = Lower * blockdiag(pivots, schur) * Lower^T where Lower has unit
/// diagonal, eliminated columns as stored, and identity on retained vertices.
/// Vertex indices refer to the factored Laplacian; `schur` is indexed by
/// position in `retained`.
struct PartialCholesky {
  Eigen::Index dimension = 0;
  std::vector<Vertex> eliminated;  // elimination order
  std::vector<Vertex> retained;    // ascending
  std::vector<std::size_t> column_offsets{0};
  std::vector<Vertex> column_rows;
  std::vector<double> column_values;
  std::vector<double> pivots;
  Laplacian schur;
  bool exact = true;
  double epsilon = 0.0;

  std::size_t factor_nonzeros() const { return column_rows.size(); }
  Eigen::MatrixXd lower_factor() const;
  /// Dense reassembled product, in the original vertex order.
  Eigen::MatrixXd reassemble() const;
};

/// Schur complement onto `retained` (ascending after normalization). An
/// explicit elimination order over the complement may be supplied; by default
/// minimum degree with lowest-id tie breaking.
Laplacian exact_schur(const Laplacian& L, std::span<const Vertex> retained, std::span<const Vertex> order = {});

PartialCholesky exact_partial_cholesky(const Laplacian& L, std::span<const Vertex> retained,
                                       std::span<const Vertex> order = {});

/// Randomized partial factorization whose product approximates L within
/// exp(+-epsilon) with high probability. epsilon == 0 means exact.
PartialCholesky apx_partial_cholesky(const Laplacian& L, std::span<const Vertex> retained, double epsilon,
                                     std::mt19937_64& rng, const EliminationOptions& options = {});

/// Lower^{-1} b by forward substitution in elimination order.
Eigen::VectorXd apply_factor_inverse(const PartialCholesky& pc, const Eigen::VectorXd& b);
void apply_factor_inverse_inplace(const PartialCholesky& pc, RowBlock& block);
void apply_factor_transpose_inverse_inplace(const PartialCholesky& pc, RowBlock& block);

/// For a complete factorization (one retained vertex): applies the
/// pseudoinverse of the reassembled product and projects out the constants.
void apply_complete_pseudo_inverse_inplace(const PartialCholesky& pc, RowBlock& block);

/// Subtracts the column mean from every column (projection orthogonal to 1).
void project_out_constant(RowBlock& block);

}  // namespace kcent
