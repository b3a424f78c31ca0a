#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "kcent/cholesky.hpp"

namespace kcent {

/// Independent random +-1 vectors. Probe i is generated from its own
/// counter-based stream keyed by (seed, i), so any subset can be produced in
/// any order or on any thread with identical results.
class ProbeEnsemble {
 public:
  ProbeEnsemble(std::uint64_t seed, std::size_t count, Eigen::Index dimension);

  std::size_t count() const { return count_; }
  Eigen::Index dimension() const { return dimension_; }
  std::uint64_t seed() const { return seed_; }

  Eigen::VectorXd probe(std::size_t i) const;
  /// Probes first .. first+k-1 as the columns of an n x k block.
  RowBlock block(std::size_t first, std::size_t k) const;

 private:
  std::uint64_t seed_;
  std::size_t count_;
  Eigen::Index dimension_;
};

/// ceil(constant * eps^-2 * ln(2n)).
std::size_t probe_count(double constant, double epsilon, Eigen::Index n);

/// (1/M) sum_i z_i^T A z_i for the implicit quadratic form `quad`.
double hutchinson_trace(const std::function<double(const Eigen::VectorXd&)>& quad, std::size_t samples,
                        Eigen::Index n, std::uint64_t seed);

/// splitmix64 finalizer, also used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace kcent
