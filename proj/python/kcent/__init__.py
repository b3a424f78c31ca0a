"""Theta-Kirchhoff edge and vertex centrality."""

from ._kcent import (
    Graph,
    KcentError,
    current_flow_edge_centrality,
    edge_betweenness,
    edge_cent_comp1,
    edge_cent_comp2,
    edge_centrality,
    effective_resistance,
    er_est,
    kirchhoff_index,
    parse_edge_list,
    parse_gml,
    read_graph,
    relative_std_dev,
    spanning_edge_centrality,
    vertex_cent_comp,
    vertex_centrality,
)

__all__ = [
    "Graph",
    "KcentError",
    "current_flow_edge_centrality",
    "edge_betweenness",
    "edge_cent_comp1",
    "edge_cent_comp2",
    "edge_centrality",
    "effective_resistance",
    "er_est",
    "kirchhoff_index",
    "parse_edge_list",
    "parse_gml",
    "read_graph",
    "relative_std_dev",
    "spanning_edge_centrality",
    "vertex_cent_comp",
    "vertex_centrality",
]
