"""Directed influence graph with merged, provenance-weighted edges."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import InvalidInputError, InvalidWeightError, MissingNodeError, SelfInfluenceError


class ConstructKind(str, enum.Enum):
    COGNITIVE = "cognitive"
    NON_COGNITIVE = "non-cognitive"
    UNSPECIFIED = "unspecified"


class Direction(str, enum.Enum):
    IN = "in"
    OUT = "out"
    ALL = "all"


@dataclass(frozen=True)
class Construct:
    id: int
    label: str
    kind: ConstructKind = ConstructKind.UNSPECIFIED


@dataclass(frozen=True)
class InfluenceEdge:
    source: int
    target: int
    weight: float
    provenance: frozenset[int] = field(default_factory=frozenset)


class InfluenceGraph:
    """Append-only directed graph of constructs.

    Node ids are dense (0..n-1, insertion order). At most one edge exists per
    ordered pair; repeated influences are merged into the edge weight.
    Iteration over nodes, edges and neighbors follows insertion order.
    """

    def __init__(self) -> None:
        self._nodes: list[Construct] = []
        self._index: dict[str, int] = {}
        self._out: list[dict[int, InfluenceEdge]] = []
        self._in: list[dict[int, InfluenceEdge]] = []
        self._edges: dict[tuple[int, int], InfluenceEdge] = {}

    # -- nodes ---------------------------------------------------------------

    def add_construct(self, label: str, kind: ConstructKind | str = ConstructKind.UNSPECIFIED) -> int:
        if not isinstance(label, str) or not label:
            raise InvalidInputError("construct label must be a non-empty string")
        existing = self._index.get(label)
        if existing is not None:
            return existing
        node_id = len(self._nodes)
        self._nodes.append(Construct(node_id, label, ConstructKind(kind)))
        self._index[label] = node_id
        self._out.append({})
        self._in.append({})
        return node_id

    @property
    def nodes(self) -> list[Construct]:
        return list(self._nodes)

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    @property
    def labels(self) -> list[str]:
        return [c.label for c in self._nodes]

    def label(self, node: int) -> str:
        self._check(node)
        return self._nodes[node].label

    def id_of(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise MissingNodeError(f"unknown construct {label!r}") from None

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def _check(self, node: int) -> None:
        if not isinstance(node, (int, np.integer)) or not 0 <= node < len(self._nodes):
            raise MissingNodeError(f"no node with id {node!r}")

    # -- edges ---------------------------------------------------------------

    def merge_edge(self, source: int, target: int, theory_code: int | None = None) -> float:
        """Record one influence of ``source`` on ``target`` and return the new weight.

        With a theory code the weight is the number of distinct supporting
        theories; without one the weight grows by one.
        """
        self._check(source)
        self._check(target)
        if source == target:
            raise SelfInfluenceError(f"construct {self._nodes[source].label!r} cannot influence itself")
        edge = self._edges.get((source, target))
        if edge is None:
            provenance = frozenset() if theory_code is None else frozenset([int(theory_code)])
            new = InfluenceEdge(source, target, 1.0, provenance)
        elif theory_code is None:
            new = InfluenceEdge(source, target, edge.weight + 1.0, edge.provenance)
        else:
            provenance = edge.provenance | {int(theory_code)}
            new = InfluenceEdge(source, target, float(len(provenance)), provenance)
        self._store(new)
        return new.weight

    def put_edge(self, source: int, target: int, weight: float, provenance: Iterable[int] = ()) -> None:
        """Insert or overwrite an edge with an explicit weight (used for reweighted copies)."""
        self._check(source)
        self._check(target)
        if source == target:
            raise SelfInfluenceError(f"construct {self._nodes[source].label!r} cannot influence itself")
        weight = float(weight)
        if not np.isfinite(weight) or weight <= 0:
            raise InvalidWeightError(f"edge weight must be positive and finite, got {weight}")
        self._store(InfluenceEdge(source, target, weight, frozenset(int(c) for c in provenance)))

    def _store(self, edge: InfluenceEdge) -> None:
        self._edges[(edge.source, edge.target)] = edge
        self._out[edge.source][edge.target] = edge
        self._in[edge.target][edge.source] = edge

    def edge(self, source: int, target: int) -> InfluenceEdge | None:
        return self._edges.get((source, target))

    def edges(self) -> Iterator[InfluenceEdge]:
        return iter(list(self._edges.values()))

    def out_edges(self, node: int) -> list[InfluenceEdge]:
        self._check(node)
        return list(self._out[node].values())

    def in_edges(self, node: int) -> list[InfluenceEdge]:
        self._check(node)
        return list(self._in[node].values())

    def neighbors(self, node: int, direction: Direction | str = Direction.ALL) -> list[int]:
        self._check(node)
        direction = Direction(direction)
        if direction is Direction.OUT:
            return list(self._out[node])
        if direction is Direction.IN:
            return list(self._in[node])
        merged = dict.fromkeys(self._in[node])
        merged.update(dict.fromkeys(self._out[node]))
        return list(merged)

    # -- derived graphs ------------------------------------------------------

    def _empty_copy(self, order: list[int] | None = None) -> tuple[InfluenceGraph, list[int]]:
        order = list(range(self.node_count)) if order is None else order
        g = InfluenceGraph()
        remap = [0] * self.node_count
        for old in order:
            c = self._nodes[old]
            remap[old] = g.add_construct(c.label, c.kind)
        return g, remap

    def transpose(self) -> InfluenceGraph:
        g, _ = self._empty_copy()
        for e in self._edges.values():
            g._store(InfluenceEdge(e.target, e.source, e.weight, e.provenance))
        return g

    def reweighted(self, weights: dict[tuple[int, int], float]) -> InfluenceGraph:
        """Copy with every edge weight replaced by ``weights[(source, target)]``."""
        g, _ = self._empty_copy()
        for key, e in self._edges.items():
            g.put_edge(e.source, e.target, weights[key], e.provenance)
        return g

    def canonical(self) -> InfluenceGraph:
        """Copy re-indexed by sorted label, with edges ordered by (source, target)."""
        order = sorted(range(self.node_count), key=lambda i: self._nodes[i].label)
        g, remap = self._empty_copy(order)
        moved = [
            InfluenceEdge(remap[e.source], remap[e.target], e.weight, e.provenance)
            for e in self._edges.values()
        ]
        for e in sorted(moved, key=lambda e: (e.source, e.target)):
            g._store(e)
        return g

    # -- numeric views -------------------------------------------------------

    def adjacency(self, weighted: bool = True) -> np.ndarray:
        """Dense matrix with ``A[u, v]`` = weight of u -> v (1.0 when unweighted)."""
        n = self.node_count
        a = np.zeros((n, n))
        for e in self._edges.values():
            a[e.source, e.target] = e.weight if weighted else 1.0
        return a

    def csr(self, direction: Direction | str = Direction.OUT) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Compressed adjacency (indptr, indices, weights) in neighbor insertion order."""
        direction = Direction(direction)
        table = self._out if direction is Direction.OUT else self._in
        if direction is Direction.ALL:
            raise ValueError("csr supports 'in' or 'out' only")
        indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        indices, weights = [], []
        for u, row in enumerate(table):
            for v, e in row.items():
                indices.append(v)
                weights.append(e.weight)
            indptr[u + 1] = len(indices)
        return indptr, np.asarray(indices, dtype=np.int64), np.asarray(weights, dtype=float)

    # -- comparison ----------------------------------------------------------

    def signature(self) -> tuple:
        """Label-based description used for equality (ids and kinds ignored)."""
        labels = self.labels
        edges = sorted(
            (labels[e.source], labels[e.target], e.weight, tuple(sorted(e.provenance)))
            for e in self._edges.values()
        )
        return tuple(sorted(labels)), tuple(edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InfluenceGraph):
            return NotImplemented
        return self.signature() == other.signature()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"InfluenceGraph(nodes={self.node_count}, edges={self.edge_count})"


def from_edges(edges: Iterable[tuple], nodes: Iterable[str] = ()) -> InfluenceGraph:
    """Build a graph from ``(source, target[, theory_code])`` label tuples."""
    g = InfluenceGraph()
    for label in nodes:
        g.add_construct(label)
    for item in edges:
        source, target, *rest = item
        code = rest[0] if rest else None
        g.merge_edge(g.add_construct(source), g.add_construct(target), code)
    return g
