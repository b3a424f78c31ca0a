#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kcent/graph.hpp"
#include "kcent/oracle.hpp"

namespace kcent {

enum class GraphFormat { EdgeList, Gml };

GraphFormat parse_format(std::string_view name);

/// A graph together with the external label of every dense vertex id.
struct LabeledGraph {
  WeightedGraph graph;
  std::vector<std::string> labels;
};

/// Lines "u v [w]"; '#' starts a comment. When every label is a non-negative
/// integer, dense ids follow numeric order; otherwise first appearance.
LabeledGraph parse_edge_list(std::string_view text);

/// The graph [ node [ id N ] edge [ source S target T value W ] ] subset of
/// GML. Unknown keys, including nested lists, are skipped. Labels are the node
/// ids as written.
LabeledGraph parse_gml(std::string_view text);

LabeledGraph read_graph(const std::string& path, GraphFormat format);

/// "u v w" per edge in id order, using labels when given.
std::string emit_edge_list(const WeightedGraph& g, const std::vector<std::string>& labels = {});

/// 12 significant digits; integral values keep a trailing ".0".
std::string format_value(double value);

/// "id_u,id_v,value" (edge reports) or "id,value" (vertex reports).
std::string report_csv(const LabeledGraph& g, const CentralityReport& report);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace kcent
