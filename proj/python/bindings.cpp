#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kcent/error.hpp"
#include "kcent/estimators.hpp"
#include "kcent/io.hpp"
#include "kcent/oracle.hpp"

namespace py = pybind11;
using namespace kcent;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(py::ssize_t(v.size()), v.data()); }

WeightedGraph make_graph(const std::vector<std::tuple<Vertex, Vertex, double>>& edges, std::optional<Vertex> n) {
  std::vector<Edge> list;
  list.reserve(edges.size());
  for (const auto& [u, v, w] : edges) list.push_back({u, v, w});
  return build_graph(list, n);
}

EstimatorOptions options(std::size_t samples, std::size_t jl_rows, unsigned jobs) {
  EstimatorOptions o;
  o.samples = samples;
  o.jl_rows = jl_rows;
  o.jobs = jobs;
  return o;
}

}  // namespace

PYBIND11_MODULE(_kcent, m) {
  m.doc() = "Theta-Kirchhoff edge and vertex centrality";

  // Instances carry the error code name as `.code`.
  py::exception<Error>(m, "KcentError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object cls = py::module_::import("kcent._kcent").attr("KcentError");
      py::object inst = cls(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(cls.ptr(), inst.ptr());
    }
  });

  py::class_<WeightedGraph>(m, "Graph")
      .def(py::init(&make_graph), py::arg("edges"), py::arg("n") = py::none(),
           "Edges as (u, v, weight) triples over dense vertex ids.")
      .def_property_readonly("num_vertices", &WeightedGraph::num_vertices)
      .def_property_readonly("num_edges", &WeightedGraph::num_edges)
      .def_property_readonly("edges",
                             [](const WeightedGraph& g) {
                               std::vector<std::tuple<Vertex, Vertex, double>> out;
                               for (const Edge& e : g.edges()) out.emplace_back(e.u, e.v, e.weight);
                               return out;
                             })
      .def("__repr__", [](const WeightedGraph& g) {
        return "Graph(n=" + std::to_string(g.num_vertices()) + ", m=" + std::to_string(g.num_edges()) + ")";
      });

  m.def("parse_edge_list", [](const std::string& text) {
    auto lg = parse_edge_list(text);
    return py::make_tuple(std::move(lg.graph), lg.labels);
  }, "Returns (graph, labels).");
  m.def("parse_gml", [](const std::string& text) {
    auto lg = parse_gml(text);
    return py::make_tuple(std::move(lg.graph), lg.labels);
  }, "Returns (graph, labels).");
  m.def("read_graph", [](const std::string& path, const std::string& format) {
    auto lg = read_graph(path, parse_format(format));
    return py::make_tuple(std::move(lg.graph), lg.labels);
  }, py::arg("path"), py::arg("format") = "edgelist");

  m.def("effective_resistance", &effective_resistance);
  m.def("kirchhoff_index", &kirchhoff_index);
  m.def("edge_centrality", [](const WeightedGraph& g, double theta, bool delta) {
    return to_array(exact_edge_centralities(g, theta, delta).values);
  }, py::arg("g"), py::arg("theta"), py::arg("delta") = false);
  m.def("vertex_centrality", [](const WeightedGraph& g, double theta) {
    return to_array(exact_vertex_centralities(g, theta).values);
  }, py::arg("g"), py::arg("theta"));

  m.def("edge_cent_comp1", [](const WeightedGraph& g, double theta, double eps, std::uint64_t seed, std::size_t samples,
                              unsigned jobs) {
    py::gil_scoped_release release;
    return edge_cent_comp1(g, theta, eps, seed, options(samples, 0, jobs)).values;
  }, py::arg("g"), py::arg("theta"), py::arg("eps"), py::arg("seed") = 0, py::arg("samples") = 0, py::arg("jobs") = 1);
  m.def("edge_cent_comp2", [](const WeightedGraph& g, double theta, double eps, std::uint64_t seed, std::size_t samples,
                              std::size_t jl_rows, unsigned jobs) {
    py::gil_scoped_release release;
    return edge_cent_comp2(g, theta, eps, seed, options(samples, jl_rows, jobs)).values;
  }, py::arg("g"), py::arg("theta"), py::arg("eps"), py::arg("seed") = 0, py::arg("samples") = 0,
     py::arg("jl_rows") = 0, py::arg("jobs") = 1);
  m.def("vertex_cent_comp", [](const WeightedGraph& g, double theta, double eps, std::uint64_t seed, std::size_t samples,
                               unsigned jobs) {
    py::gil_scoped_release release;
    return vertex_cent_comp(g, theta, eps, seed, options(samples, 0, jobs)).values;
  }, py::arg("g"), py::arg("theta"), py::arg("eps"), py::arg("seed") = 0, py::arg("samples") = 0, py::arg("jobs") = 1);
  m.def("er_est", [](const WeightedGraph& g, double eps, std::uint64_t seed, std::size_t jl_rows) {
    py::gil_scoped_release release;
    return er_est(g, eps, seed, options(0, jl_rows, 1));
  }, py::arg("g"), py::arg("eps"), py::arg("seed") = 0, py::arg("jl_rows") = 0);

  m.def("edge_betweenness", [](const WeightedGraph& g) { return to_array(edge_betweenness(g).values); });
  m.def("spanning_edge_centrality", [](const WeightedGraph& g) { return to_array(spanning_edge_centrality(g).values); });
  m.def("current_flow_edge_centrality",
        [](const WeightedGraph& g) { return to_array(current_flow_edge_centrality(g).values); });
  m.def("relative_std_dev", [](const std::vector<double>& v) { return relative_std_dev(v); });
}
