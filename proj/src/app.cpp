#include "kcent/app.hpp"

#include <chrono>
#include <cstdio>

#include "kcent/error.hpp"
#include "kcent/oracle.hpp"

namespace kcent {
namespace {

bool is_edge_method(const std::string& m) { return m == "exact" || m == "quad-est" || m == "sherman-morrison"; }

std::string meta_line(const std::string& key, const std::string& value) { return key + "=" + value + "\n"; }

std::string number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string base_meta(const RunConfig& cfg, const LabeledGraph& g) {
  std::string meta;
  meta += meta_line("command", cfg.command);
  meta += meta_line("n", std::to_string(g.graph.num_vertices()));
  meta += meta_line("m", std::to_string(g.graph.num_edges()));
  meta += meta_line("theta", number(cfg.theta));
  meta += meta_line("seed", std::to_string(cfg.seed));
  return meta;
}

void require_dense_cap(const RunConfig& cfg, const LabeledGraph& g) {
  if (g.graph.num_vertices() > cfg.dense_cap) {
    fail(ErrorCode::DimensionCap, "graph has " + std::to_string(g.graph.num_vertices()) +
                                      " vertices, above the dense cap of " + std::to_string(cfg.dense_cap));
  }
}

}  // namespace

void RunConfig::validate() const {
  require_theta(theta);
  if (command == "edge") {
    if (!is_edge_method(method)) fail(ErrorCode::InvalidArgument, "edge method must be exact, quad-est or sherman-morrison");
    if (method == "quad-est" && delta_mode) {
      fail(ErrorCode::InvalidArgument, "quad-est estimates C_theta; --delta-mode is not available for it");
    }
  } else if (command == "vertex") {
    if (method != "exact" && method != "vertex") fail(ErrorCode::InvalidArgument, "vertex method must be exact or vertex");
  } else if (command == "compare") {
    if (!theta_given) fail(ErrorCode::InvalidArgument, "compare requires --theta");
  } else {
    fail(ErrorCode::InvalidArgument, "unknown command '" + command + "'");
  }
  require_epsilon(epsilon);
  if (estimator.jobs < 1) fail(ErrorCode::InvalidArgument, "--jobs must be at least 1");
}

RunResult cmd_centrality(const RunConfig& cfg, const LabeledGraph& g) {
  cfg.validate();
  require_connected(g.graph);
  CentralityReport report;
  std::string quantity;
  if (cfg.command == "edge") {
    if (cfg.method == "exact") {
      require_dense_cap(cfg, g);
      report = exact_edge_centralities(g.graph, cfg.theta, cfg.delta_mode);
      quantity = cfg.delta_mode ? "C_theta_delta" : "C_theta";
    } else if (cfg.method == "quad-est") {
      report = edge_cent_comp1(g.graph, cfg.theta, cfg.epsilon, cfg.seed, cfg.estimator);
      quantity = "C_theta";
    } else {
      report = edge_cent_comp2(g.graph, cfg.theta, cfg.epsilon, cfg.seed, cfg.estimator);
      quantity = "C_theta_delta";
    }
  } else {
    if (cfg.method == "exact") {
      require_dense_cap(cfg, g);
      report = exact_vertex_centralities(g.graph, cfg.theta);
    } else {
      report = vertex_cent_comp(g.graph, cfg.theta, cfg.epsilon, cfg.seed, cfg.estimator);
    }
    quantity = "C_theta_delta";
  }

  RunResult result;
  result.csv = report_csv(g, report);
  result.meta = base_meta(cfg, g);
  result.meta += meta_line("method", cfg.method);
  result.meta += meta_line("quantity", quantity);
  result.meta += meta_line("eps", number(cfg.method == "exact" ? 0.0 : cfg.epsilon));
  result.meta += meta_line("samples", std::to_string(report.samples));
  result.meta += meta_line("jobs", std::to_string(cfg.estimator.jobs));
  result.meta += meta_line("wall_time", number(report.wall_seconds));
  return result;
}

RunResult cmd_compare(const RunConfig& cfg, const LabeledGraph& g) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  require_connected(g.graph);
  require_dense_cap(cfg, g);
  const auto kirchhoff = exact_edge_centralities(g.graph, cfg.theta, true);
  const auto betweenness = edge_betweenness(g.graph);
  const auto spanning = spanning_edge_centrality(g.graph);
  const auto current = current_flow_edge_centrality(g.graph);

  RunResult result;
  result.csv = "measure,rsd\n";
  const std::pair<const char*, const CentralityReport*> rows[] = {
      {"kirchhoff-delta", &kirchhoff}, {"betweenness", &betweenness}, {"spanning", &spanning}, {"current-flow", &current}};
  for (const auto& [name, report] : rows) {
    result.csv += std::string(name) + "," + format_value(relative_std_dev(report->values)) + "\n";
  }
  result.meta = base_meta(cfg, g);
  result.meta += meta_line("method", "exact");
  result.meta += meta_line("quantity", "rsd");
  result.meta += meta_line("eps", "0");
  result.meta += meta_line(
      "wall_time", number(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()));
  return result;
}

RunResult run(const RunConfig& cfg) {
  cfg.validate();
  const LabeledGraph g = read_graph(cfg.input, cfg.format);
  RunResult result = cfg.command == "compare" ? cmd_compare(cfg, g) : cmd_centrality(cfg, g);
  if (cfg.output.empty()) {
    std::fwrite(result.csv.data(), 1, result.csv.size(), stdout);
  } else {
    write_file(cfg.output, result.csv);
    write_file(cfg.output + ".meta", result.meta);
  }
  return result;
}

}  // namespace kcent
