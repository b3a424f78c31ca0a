#include "kcent/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "kcent/error.hpp"

namespace kcent {
namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

std::optional<double> to_double(std::string_view s) {
  double value = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::optional<unsigned long long> to_index(std::string_view s) {
  if (s.empty() || s.size() > 18) return std::nullopt;
  unsigned long long value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

// Assigns dense ids to labels.
std::vector<Edge> densify(const std::vector<std::pair<std::string, std::string>>& ends, const std::vector<double>& w,
                          std::vector<std::string>& labels) {
  std::vector<std::string> order;
  std::unordered_map<std::string, Vertex> id;
  bool numeric = true;
  for (const auto& [a, b] : ends) {
    for (const auto* s : {&a, &b}) {
      if (id.emplace(*s, 0).second) {
        order.push_back(*s);
        numeric = numeric && to_index(*s).has_value();
      }
    }
  }
  if (numeric) {
    std::stable_sort(order.begin(), order.end(),
                     [](const std::string& x, const std::string& y) { return *to_index(x) < *to_index(y); });
  }
  for (std::size_t i = 0; i < order.size(); ++i) id[order[i]] = static_cast<Vertex>(i);
  labels = order;
  std::vector<Edge> edges;
  edges.reserve(ends.size());
  for (std::size_t i = 0; i < ends.size(); ++i) edges.push_back(Edge{id[ends[i].first], id[ends[i].second], w[i]});
  return edges;
}

LabeledGraph finish(std::vector<Edge> edges, std::vector<std::string> labels) {
  LabeledGraph out;
  out.graph = build_graph(edges, static_cast<Vertex>(labels.size()));
  out.labels = std::move(labels);
  return out;
}

// GML tokens: '[', ']', bare words/numbers, or quoted strings.
struct GmlToken {
  enum Kind { Open, Close, Word, String, End } kind;
  std::string_view text;
  std::size_t line;
};

class GmlLexer {
 public:
  explicit GmlLexer(std::string_view s) : s_(s) {}

  GmlToken next() {
    for (;;) {
      while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        if (s_[pos_] == '\n') ++line_;
        ++pos_;
      }
      if (pos_ < s_.size() && s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
    if (pos_ >= s_.size()) return {GmlToken::End, {}, line_};
    const char c = s_[pos_];
    if (c == '[') return {GmlToken::Open, s_.substr(pos_++, 1), line_};
    if (c == ']') return {GmlToken::Close, s_.substr(pos_++, 1), line_};
    if (c == '"') {
      const std::size_t start = ++pos_;
      const std::size_t line = line_;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\n') ++line_;
        ++pos_;
      }
      if (pos_ >= s_.size()) fail(ErrorCode::ParseError, at_line(line) + "unterminated string");
      return {GmlToken::String, s_.substr(start, pos_++ - start), line};
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '[' &&
           s_[pos_] != ']') {
      ++pos_;
    }
    return {GmlToken::Word, s_.substr(start, pos_ - start), line_};
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

using GmlFields = std::vector<std::pair<std::string_view, GmlToken>>;

// Reads "key value" pairs up to the closing bracket. A nested list is handed
// to on_list, which returns false to have it skipped.
using ListHandler = std::function<bool(std::string_view, GmlLexer&)>;

bool skip_list(std::string_view, GmlLexer&) { return false; }

GmlFields read_list(GmlLexer& lex, bool top, const ListHandler& on_list) {
  GmlFields fields;
  for (;;) {
    const GmlToken key = lex.next();
    if (key.kind == GmlToken::End) {
      if (top) return fields;
      fail(ErrorCode::ParseError, at_line(key.line) + "missing ']'");
    }
    if (key.kind == GmlToken::Close) {
      if (!top) return fields;
      fail(ErrorCode::ParseError, at_line(key.line) + "unexpected ']'");
    }
    if (key.kind != GmlToken::Word) fail(ErrorCode::ParseError, at_line(key.line) + "expected a key");
    const GmlToken value = lex.next();
    if (value.kind == GmlToken::Open) {
      if (!on_list(key.text, lex)) read_list(lex, false, skip_list);
    } else if (value.kind == GmlToken::Word || value.kind == GmlToken::String) {
      fields.emplace_back(key.text, value);
    } else {
      fail(ErrorCode::ParseError, at_line(value.line) + "missing value for key '" + std::string(key.text) + "'");
    }
  }
}

const GmlToken* field(const GmlFields& fields, std::string_view key) {
  for (const auto& [k, v] : fields) {
    if (k == key) return &v;
  }
  return nullptr;
}

}  // namespace

GraphFormat parse_format(std::string_view name) {
  if (name == "edgelist") return GraphFormat::EdgeList;
  if (name == "gml") return GraphFormat::Gml;
  fail(ErrorCode::InvalidArgument, "unknown graph format '" + std::string(name) + "'");
}

LabeledGraph parse_edge_list(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> ends;
  std::vector<double> weights;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() < 2 || tokens.size() > 3) {
      fail(ErrorCode::ParseError, at_line(line_no) + "expected 'u v [w]'");
    }
    double w = 1.0;
    if (tokens.size() == 3) {
      const auto parsed = to_double(tokens[2]);
      if (!parsed || !std::isfinite(*parsed)) {
        fail(ErrorCode::ParseError, at_line(line_no) + "bad weight '" + std::string(tokens[2]) + "'");
      }
      w = *parsed;
    }
    if (!(w > 0.0)) fail(ErrorCode::NonPositiveWeight, at_line(line_no) + "weight must be positive");
    if (tokens[0] == tokens[1]) fail(ErrorCode::SelfLoop, at_line(line_no) + "self-loop");
    ends.emplace_back(std::string(tokens[0]), std::string(tokens[1]));
    weights.push_back(w);
  }
  if (ends.empty()) fail(ErrorCode::EmptyGraph, "edge list has no edges");
  std::vector<std::string> labels;
  auto edges = densify(ends, weights, labels);
  return finish(std::move(edges), std::move(labels));
}

LabeledGraph parse_gml(std::string_view text) {
  GmlLexer lex(text);
  std::vector<std::string> labels;
  std::map<std::string, Vertex, std::less<>> ids;
  struct RawEdge {
    std::string_view source, target;
    double weight;
    std::size_t line;
  };
  std::vector<RawEdge> raw;
  bool saw_graph = false;

  auto graph_items = [&](std::string_view key, GmlLexer& inner) {
    if (key == "node") {
      const auto fields = read_list(inner, false, skip_list);
      const GmlToken* id = field(fields, "id");
      if (!id) fail(ErrorCode::ParseError, "node without id");
      const std::string name(id->text);
      if (!ids.emplace(name, static_cast<Vertex>(labels.size())).second) {
        fail(ErrorCode::DuplicateNodeId, at_line(id->line) + "duplicate node id " + name);
      }
      labels.push_back(name);
      return true;
    }
    if (key == "edge") {
      const auto fields = read_list(inner, false, skip_list);
      const GmlToken* s = field(fields, "source");
      const GmlToken* t = field(fields, "target");
      if (!s || !t) fail(ErrorCode::ParseError, "edge without source or target");
      double w = 1.0;
      const GmlToken* value = field(fields, "value");
      if (!value) value = field(fields, "weight");
      if (value) {
        const auto parsed = to_double(value->text);
        if (!parsed || !std::isfinite(*parsed)) fail(ErrorCode::ParseError, at_line(value->line) + "bad edge value");
        w = *parsed;
      }
      raw.push_back(RawEdge{s->text, t->text, w, s->line});
      return true;
    }
    return false;
  };

  read_list(lex, true, [&](std::string_view key, GmlLexer& inner) {
    if (key != "graph") return false;
    if (saw_graph) fail(ErrorCode::ParseError, "more than one graph block");
    saw_graph = true;
    read_list(inner, false, graph_items);
    return true;
  });
  if (!saw_graph) fail(ErrorCode::ParseError, "no graph block");

  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& e : raw) {
    const auto s = ids.find(e.source);
    const auto t = ids.find(e.target);
    if (s == ids.end() || t == ids.end()) fail(ErrorCode::ParseError, at_line(e.line) + "edge refers to an unknown node");
    if (!(e.weight > 0.0)) fail(ErrorCode::NonPositiveWeight, at_line(e.line) + "weight must be positive");
    edges.push_back(Edge{s->second, t->second, e.weight});
  }
  if (edges.empty()) fail(ErrorCode::EmptyGraph, "graph has no edges");
  return finish(std::move(edges), std::move(labels));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorCode::InvalidArgument, "write to '" + path + "' failed");
}

LabeledGraph read_graph(const std::string& path, GraphFormat format) {
  const std::string text = read_file(path);
  return format == GraphFormat::Gml ? parse_gml(text) : parse_edge_list(text);
}

std::string emit_edge_list(const WeightedGraph& g, const std::vector<std::string>& labels) {
  auto name = [&](Vertex v) { return labels.empty() ? std::to_string(v) : labels.at(static_cast<std::size_t>(v)); };
  std::string out;
  char buf[64];
  for (const Edge& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.weight);
    out += name(e.u) + " " + name(e.v) + " " + buf + "\n";
  }
  return out;
}

std::string format_value(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  std::string s(buf);
  if (std::isfinite(value) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string report_csv(const LabeledGraph& g, const CentralityReport& report) {
  std::string out;
  if (report.kind == CentralityKind::Edge) {
    if (report.values.size() != static_cast<std::size_t>(g.graph.num_edges())) {
      fail(ErrorCode::DimensionMismatch, "report does not cover every edge");
    }
    out += "id_u,id_v,value\n";
    for (EdgeId e = 0; e < g.graph.num_edges(); ++e) {
      const Edge& ed = g.graph.edge(e);
      out += g.labels.at(static_cast<std::size_t>(ed.u)) + "," + g.labels.at(static_cast<std::size_t>(ed.v)) + "," +
             format_value(report.values[static_cast<std::size_t>(e)]) + "\n";
    }
  } else {
    if (report.values.size() != static_cast<std::size_t>(g.graph.num_vertices())) {
      fail(ErrorCode::DimensionMismatch, "report does not cover every vertex");
    }
    out += "id,value\n";
    for (Vertex v = 0; v < g.graph.num_vertices(); ++v) {
      out += g.labels.at(static_cast<std::size_t>(v)) + "," + format_value(report.values[static_cast<std::size_t>(v)]) +
             "\n";
    }
  }
  return out;
}

}  // namespace kcent
