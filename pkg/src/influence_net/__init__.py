"""Centrality analysis toolkit for directed influence ontology graphs."""

__version__ = "0.1.0"

from .centrality import MEASURES, CentralityResult, SolverConfig, run_suite
from .graph import Construct, ConstructKind, InfluenceEdge, InfluenceGraph, from_edges
from .ingest import parse_edge_csv, parse_triples, validate
from .ranking import aggregate, borda, rank, top_k

__all__ = [
    "MEASURES",
    "CentralityResult",
    "Construct",
    "ConstructKind",
    "InfluenceEdge",
    "InfluenceGraph",
    "SolverConfig",
    "aggregate",
    "borda",
    "from_edges",
    "parse_edge_csv",
    "parse_triples",
    "rank",
    "run_suite",
    "top_k",
    "validate",
]
