#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "kcent/dense.hpp"
#include "kcent/estimators.hpp"
#include "kcent/io.hpp"

namespace kcent {

/// Everything a kcent invocation needs besides the graph itself.
struct RunConfig {
  std::string command = "edge";  // edge | vertex | compare
  std::string input;
  GraphFormat format = GraphFormat::EdgeList;
  std::string method = "exact";  // exact | quad-est | sherman-morrison | vertex
  double theta = 0.1;
  bool theta_given = false;
  double epsilon = 0.2;
  std::uint64_t seed = 0;
  bool delta_mode = false;
  std::string output;  // empty: stdout, no sidecar
  EstimatorOptions estimator{};
  Eigen::Index dense_cap = kDefaultDenseCap;

  void validate() const;
};

struct RunResult {
  std::string csv;
  std::string meta;  // key=value lines
};

RunResult cmd_centrality(const RunConfig& cfg, const LabeledGraph& g);
RunResult cmd_compare(const RunConfig& cfg, const LabeledGraph& g);

/// Reads the input, dispatches on cfg.command and writes the CSV (plus a
/// ".meta" sidecar when writing to a file).
RunResult run(const RunConfig& cfg);

}  // namespace kcent
