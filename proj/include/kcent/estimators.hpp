#pragma once

#include <cstdint>
#include <vector>

#include "kcent/cholesky.hpp"
#include "kcent/graph.hpp"
#include "kcent/oracle.hpp"
#include "kcent/solver.hpp"

namespace kcent {

/// Sampling constants and execution knobs shared by the randomized
/// estimators. The default constants carry the worst-case failure budgets and
/// are conservative at small n.
struct EstimatorOptions {
  double quad_constant = 192.0;    // probes for the recursion-based edge estimator
  double solve_constant = 432.0;   // probes for the solver-based edge and vertex estimators
  double jl_constant = 24.0;       // rows of the resistance sketch
  std::size_t samples = 0;         // fixed probe count; 0 derives it from the constants
  std::size_t min_samples = 1;     // floor on the probe count
  std::size_t jl_rows = 0;         // fixed sketch rows; 0 derives them
  EliminationOptions elimination{};
  SolverOptions solver{};
  std::size_t chunk_size = 128;    // probes per block
  unsigned jobs = 1;               // worker threads over probe blocks
};

/// C_theta(e) for every edge via per-probe recursive quadratic forms.
CentralityReport edge_cent_comp1(const WeightedGraph& g, double theta, double epsilon, std::uint64_t seed,
                                 const EstimatorOptions& options = {});

/// Effective resistance of every edge (indexed by edge id) from a random
/// projection of W^1/2 B L^+.
std::vector<double> er_est(const WeightedGraph& g, double epsilon, std::uint64_t seed,
                           const EstimatorOptions& options = {});

/// C_theta^Delta(e) for every edge via the rank-one update formula with a
/// sampled numerator and sketched resistances in the denominator.
CentralityReport edge_cent_comp2(const WeightedGraph& g, double theta, double epsilon, std::uint64_t seed,
                                 const EstimatorOptions& options = {});

/// C_theta^Delta(v) for every vertex via the rank-|E(v)| update formula.
CentralityReport vertex_cent_comp(const WeightedGraph& g, double theta, double epsilon, std::uint64_t seed,
                                  const EstimatorOptions& options = {});

/// Probe counts the estimators would use.
std::size_t comp1_samples(Vertex n, double epsilon, const EstimatorOptions& options = {});
std::size_t comp2_samples(Vertex n, double epsilon, const EstimatorOptions& options = {});
std::size_t jl_rows(Vertex n, double epsilon, const EstimatorOptions& options = {});

}  // namespace kcent
