"""The 20-measure centrality registry and its kernels.

Every kernel is a pure function of ``(graph, config)`` and returns a
:class:`CentralityResult` whose ``scores`` array is indexed by node id.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from ._kernels import brandes_unweighted
from .errors import (
    DegenerateInputError,
    InfluenceNetError,
    InvalidParameterError,
    InvalidWeightError,
    NonConvergenceError,
)
from .graph import Direction, InfluenceGraph

MEASURES = (
    "in-degree",
    "out-degree",
    "total-degree",
    "weighted-in-degree",
    "weighted-out-degree",
    "weighted-total-degree",
    "betweenness",
    "weighted-betweenness",
    "closeness-in",
    "closeness-out",
    "harmonic-in",
    "harmonic-out",
    "eigenvector-right",
    "eigenvector-left",
    "katz",
    "pagerank",
    "reverse-pagerank",
    "hits-authority",
    "hits-hub",
    "contribution",
)

# The six families shown first in reports, as (short name, measure).
FAMILIES = (
    ("AC", "hits-authority"),
    ("BC", "betweenness"),
    ("EC", "eigenvector-right"),
    ("Contribution", "contribution"),
    ("OC", "out-degree"),
    ("IC", "eigenvector-left"),
)

PROBABILITY_MEASURES = frozenset({"pagerank", "reverse-pagerank"})
UNIT_NORM_MEASURES = frozenset(
    {"eigenvector-right", "eigenvector-left", "katz", "hits-authority", "hits-hub", "contribution"}
)


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-10
    max_iterations: int = 1000
    damping: float = 0.85
    katz_alpha: float = 0.005
    katz_beta: float = 1.0
    # Use edge weights in the matrix-based measures (eigenvector, Katz, PageRank, HITS).
    weighted: bool = True
    jaccard_epsilon: float = 1e-6

    def __post_init__(self):
        if not (self.tolerance > 0 and math.isfinite(self.tolerance)):
            raise InvalidParameterError(f"tolerance must be positive, got {self.tolerance}")
        if isinstance(self.max_iterations, bool) or int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise InvalidParameterError(f"max_iterations must be a positive integer, got {self.max_iterations}")
        if not 0 < self.damping < 1:
            raise InvalidParameterError(f"damping must lie in (0, 1), got {self.damping}")
        if not (self.katz_alpha > 0 and math.isfinite(self.katz_alpha)):
            raise InvalidParameterError(f"katz_alpha must be positive, got {self.katz_alpha}")
        if not (self.katz_beta > 0 and math.isfinite(self.katz_beta)):
            raise InvalidParameterError(f"katz_beta must be positive, got {self.katz_beta}")
        if not 0 < self.jaccard_epsilon <= 1:
            raise InvalidParameterError(f"jaccard_epsilon must lie in (0, 1], got {self.jaccard_epsilon}")


DEFAULT_CONFIG = SolverConfig()


@dataclass
class CentralityResult:
    measure: str
    scores: np.ndarray
    converged: bool = True
    iterations: int = 0
    residual: float = 0.0
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _l2(x: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(x)
    if norm == 0:
        return x
    return x / norm


# -- degree --------------------------------------------------------------------


def degree_scores(graph: InfluenceGraph, direction: str = "total", weighted: bool = False) -> CentralityResult:
    n = graph.node_count
    out = np.zeros(n)
    inn = np.zeros(n)
    for e in graph.edges():
        w = e.weight if weighted else 1.0
        out[e.source] += w
        inn[e.target] += w
    if direction == "in":
        scores = inn
    elif direction == "out":
        scores = out
    elif direction == "total":
        scores = inn + out
    else:
        raise InvalidParameterError(f"unknown degree direction {direction!r}")
    name = f"{'weighted-' if weighted else ''}{direction}-degree"
    return CentralityResult(name, scores)


# -- shortest paths ------------------------------------------------------------


def _same_distance(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))


def _brandes_weighted(graph: InfluenceGraph) -> np.ndarray:
    n = graph.node_count
    succ = [[(e.target, 1.0 / e.weight) for e in graph.out_edges(u)] for u in range(n)]
    bc = np.zeros(n)
    for s in range(n):
        order: list[int] = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0.0] * n
        sigma[s] = 1.0
        done: set[int] = set()
        best = {s: 0.0}
        heap = [(0.0, 0, s)]
        counter = 1
        while heap:
            d, _, v = heapq.heappop(heap)
            if v in done:
                continue
            done.add(v)
            order.append(v)
            for w, length in succ[v]:
                if w in done:
                    continue
                dw = d + length
                if w not in best or (dw < best[w] and not _same_distance(dw, best[w])):
                    best[w] = dw
                    sigma[w] = sigma[v]
                    preds[w] = [v]
                    heapq.heappush(heap, (dw, counter, w))
                    counter += 1
                elif _same_distance(dw, best[w]):
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    return bc


def betweenness_scores(graph: InfluenceGraph, weighted: bool = False) -> CentralityResult:
    """Unnormalized directed betweenness; weighted distances are ``1 / weight``."""
    name = "weighted-betweenness" if weighted else "betweenness"
    n = graph.node_count
    if weighted:
        for e in graph.edges():
            if not (e.weight > 0 and math.isfinite(e.weight)):
                raise InvalidWeightError(f"non-positive edge weight {e.weight}")
        return CentralityResult(name, _brandes_weighted(graph))
    indptr, indices, _ = graph.csr("out")
    return CentralityResult(name, brandes_unweighted(indptr, indices, n))


def _hop_distances(graph: InfluenceGraph, source: int, direction: str) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in graph.neighbors(v, direction):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def closeness_scores(graph: InfluenceGraph, direction: str = "out") -> CentralityResult:
    """Wasserman-Faust closeness over hop distances.

    ``direction="out"`` measures distances from the node, ``"in"`` distances to it.
    """
    direction = Direction(direction)
    if direction is Direction.ALL:
        raise InvalidParameterError("closeness direction must be 'in' or 'out'")
    n = graph.node_count
    scores = np.zeros(n)
    for v in range(n):
        dist = _hop_distances(graph, v, direction)
        reach = len(dist)
        total = sum(dist.values())
        if reach > 1:
            scores[v] = ((reach - 1) / (n - 1)) * ((reach - 1) / total)
    return CentralityResult(f"closeness-{direction.value}", scores)


def harmonic_scores(graph: InfluenceGraph, direction: str = "out") -> CentralityResult:
    direction = Direction(direction)
    if direction is Direction.ALL:
        raise InvalidParameterError("harmonic direction must be 'in' or 'out'")
    n = graph.node_count
    scores = np.zeros(n)
    for v in range(n):
        dist = _hop_distances(graph, v, direction)
        scores[v] = sum(1.0 / d for u, d in sorted(dist.items()) if u != v)
    return CentralityResult(f"harmonic-{direction.value}", scores)


# -- spectral ------------------------------------------------------------------


def _require_edges(graph: InfluenceGraph, what: str) -> None:
    if graph.edge_count == 0:
        raise DegenerateInputError(f"{what} is undefined on a graph without edges")


_MIN_SHIFT = 1e-3


def eigenvector_scores(
    graph: InfluenceGraph, side: str = "right", config: SolverConfig = DEFAULT_CONFIG
) -> CentralityResult:
    """Dominant eigenvector of the adjacency matrix by power iteration.

    ``side="right"`` solves ``A x = lambda x`` (a node scores by whom it
    influences); ``side="left"`` iterates on the transpose (a node scores by
    who influences it). Each step applies ``A + s I`` where ``s = x^T A x``
    is the current spectral radius estimate. The shift leaves the
    eigenvectors unchanged and stops oscillation on periodic graphs; tying
    it to the spectrum keeps it from swamping small weights and slowing
    convergence.
    """
    if side not in ("right", "left"):
        raise InvalidParameterError(f"eigenvector side must be 'right' or 'left', got {side!r}")
    name = f"eigenvector-{side}"
    _require_edges(graph, name)
    a = graph.adjacency(config.weighted)
    if side == "left":
        a = a.T
    a = a / a.max()
    n = graph.node_count
    x = np.full(n, 1.0 / math.sqrt(n))
    residual = math.inf
    for it in range(1, config.max_iterations + 1):
        ax = a @ x
        # floor keeps the shift positive on nilpotent (acyclic) matrices
        shift = max(float(x @ ax), _MIN_SHIFT)
        nxt = ax + shift * x
        np.maximum(nxt, 0.0, out=nxt)
        nxt = _l2(nxt)
        residual = float(np.linalg.norm(nxt - x))
        x = nxt
        if residual <= config.tolerance:
            return CentralityResult(name, x, True, it, residual)
    partial = CentralityResult(name, x, False, config.max_iterations, residual)
    raise NonConvergenceError(
        f"{name} did not converge in {config.max_iterations} iterations (residual {residual:.3g})", partial
    )


def katz_scores(graph: InfluenceGraph, config: SolverConfig = DEFAULT_CONFIG) -> CentralityResult:
    """Solve ``x = alpha * A^T x + beta`` by Jacobi iteration, then L2-normalize."""
    n = graph.node_count
    if n == 0:
        raise DegenerateInputError("katz is undefined on an empty graph")
    a = graph.adjacency(config.weighted)
    strength = a.sum(axis=0) + a.sum(axis=1)
    bound = float(strength.max())
    if config.katz_alpha * bound >= 1:
        raise InvalidParameterError(
            f"katz_alpha={config.katz_alpha} violates alpha * max total degree < 1 (max total degree {bound:g})"
        )
    at = a.T
    beta = np.full(n, config.katz_beta)
    x = beta.copy()
    residual = math.inf
    for it in range(1, config.max_iterations + 1):
        nxt = config.katz_alpha * (at @ x) + beta
        residual = float(np.abs(nxt - x).max())
        x = nxt
        if residual <= config.tolerance:
            return CentralityResult("katz", _l2(x), True, it, residual)
    partial = CentralityResult("katz", _l2(x), False, config.max_iterations, residual)
    raise NonConvergenceError(f"katz did not converge in {config.max_iterations} iterations", partial)


def pagerank_scores(
    graph: InfluenceGraph, reverse: bool = False, config: SolverConfig = DEFAULT_CONFIG
) -> CentralityResult:
    """Damped PageRank with weight-proportional transitions and uniform dangling redistribution."""
    name = "reverse-pagerank" if reverse else "pagerank"
    n = graph.node_count
    if n == 0:
        raise DegenerateInputError(f"{name} is undefined on an empty graph")
    a = graph.adjacency(config.weighted)
    if reverse:
        a = a.T
    out = a.sum(axis=1)
    dangling = out == 0
    p = np.divide(a, out[:, None], out=np.zeros_like(a), where=~dangling[:, None])
    pt = p.T
    d = config.damping
    x = np.full(n, 1.0 / n)
    residual = math.inf
    for it in range(1, config.max_iterations + 1):
        nxt = d * (pt @ x + x[dangling].sum() / n) + (1.0 - d) / n
        nxt /= nxt.sum()
        residual = float(np.abs(nxt - x).sum())
        x = nxt
        if residual <= config.tolerance:
            return CentralityResult(name, x, True, it, residual)
    partial = CentralityResult(name, x, False, config.max_iterations, residual)
    raise NonConvergenceError(f"{name} did not converge in {config.max_iterations} iterations", partial)


def hits_scores(
    graph: InfluenceGraph, config: SolverConfig = DEFAULT_CONFIG
) -> tuple[CentralityResult, CentralityResult]:
    """Authority and hub vectors by alternating ``a = A^T h``, ``h = A a``."""
    _require_edges(graph, "hits")
    a_mat = graph.adjacency(config.weighted)
    at = a_mat.T
    n = graph.node_count
    hub = np.full(n, 1.0 / math.sqrt(n))
    auth = np.zeros(n)
    residual = math.inf
    for it in range(1, config.max_iterations + 1):
        new_auth = _l2(at @ hub)
        new_hub = _l2(a_mat @ new_auth)
        residual = float(max(np.linalg.norm(new_auth - auth), np.linalg.norm(new_hub - hub)))
        auth, hub = new_auth, new_hub
        if residual <= config.tolerance:
            return (
                CentralityResult("hits-authority", auth, True, it, residual),
                CentralityResult("hits-hub", hub, True, it, residual),
            )
    partial = (
        CentralityResult("hits-authority", auth, False, config.max_iterations, residual),
        CentralityResult("hits-hub", hub, False, config.max_iterations, residual),
    )
    raise NonConvergenceError(f"hits did not converge in {config.max_iterations} iterations", partial)


# -- contribution --------------------------------------------------------------


def inverse_jaccard_weights(graph: InfluenceGraph, epsilon: float = 1e-6) -> InfluenceGraph:
    """Copy of ``graph`` where each edge weighs ``1 - J`` (floored at ``epsilon``).

    ``J`` is the Jaccard similarity of the two endpoints' neighbor sets in
    both directions, each set excluding the opposite endpoint; ``J = 0``
    when both sets are empty.
    """
    hood = [set(graph.neighbors(v, "all")) for v in range(graph.node_count)]
    weights = {}
    for e in graph.edges():
        nu = hood[e.source] - {e.target}
        nv = hood[e.target] - {e.source}
        union = len(nu | nv)
        jac = len(nu & nv) / union if union else 0.0
        weights[(e.source, e.target)] = max(1.0 - jac, epsilon)
    return graph.reweighted(weights)


def contribution_scores(graph: InfluenceGraph, config: SolverConfig = DEFAULT_CONFIG) -> CentralityResult:
    _require_edges(graph, "contribution")
    rew = inverse_jaccard_weights(graph, config.jaccard_epsilon)
    try:
        res = eigenvector_scores(rew, "right", replace(config, weighted=True))
    except NonConvergenceError as exc:
        exc.partial.measure = "contribution"
        raise
    res.measure = "contribution"
    return res


# -- registry ------------------------------------------------------------------


def _hits_side(index: int) -> Callable[[InfluenceGraph, SolverConfig], CentralityResult]:
    def run(graph: InfluenceGraph, config: SolverConfig) -> CentralityResult:
        try:
            return hits_scores(graph, config)[index]
        except NonConvergenceError as exc:
            raise NonConvergenceError(str(exc), exc.partial[index]) from None

    return run


REGISTRY: dict[str, Callable[[InfluenceGraph, SolverConfig], CentralityResult]] = {
    "in-degree": lambda g, c: degree_scores(g, "in", False),
    "out-degree": lambda g, c: degree_scores(g, "out", False),
    "total-degree": lambda g, c: degree_scores(g, "total", False),
    "weighted-in-degree": lambda g, c: degree_scores(g, "in", True),
    "weighted-out-degree": lambda g, c: degree_scores(g, "out", True),
    "weighted-total-degree": lambda g, c: degree_scores(g, "total", True),
    "betweenness": lambda g, c: betweenness_scores(g, False),
    "weighted-betweenness": lambda g, c: betweenness_scores(g, True),
    "closeness-in": lambda g, c: closeness_scores(g, "in"),
    "closeness-out": lambda g, c: closeness_scores(g, "out"),
    "harmonic-in": lambda g, c: harmonic_scores(g, "in"),
    "harmonic-out": lambda g, c: harmonic_scores(g, "out"),
    "eigenvector-right": lambda g, c: eigenvector_scores(g, "right", c),
    "eigenvector-left": lambda g, c: eigenvector_scores(g, "left", c),
    "katz": katz_scores,
    "pagerank": lambda g, c: pagerank_scores(g, False, c),
    "reverse-pagerank": lambda g, c: pagerank_scores(g, True, c),
    "hits-authority": _hits_side(0),
    "hits-hub": _hits_side(1),
    "contribution": contribution_scores,
}
assert tuple(REGISTRY) == MEASURES


def compute(measure: str, graph: InfluenceGraph, config: SolverConfig = DEFAULT_CONFIG) -> CentralityResult:
    try:
        kernel = REGISTRY[measure]
    except KeyError:
        raise InvalidParameterError(f"unknown measure {measure!r}") from None
    return kernel(graph, config)


def run_suite(
    graph: InfluenceGraph,
    config: SolverConfig = DEFAULT_CONFIG,
    measures: tuple[str, ...] | list[str] | None = None,
) -> list[CentralityResult]:
    """Compute each selected measure (all 20 by default) in registry order.

    A measure that fails does not stop the suite: its result carries
    ``error`` and ``converged=False``, with the last iterate as scores when
    the failure was non-convergence and zeros otherwise.
    """
    selected = MEASURES if measures is None else tuple(measures)
    unknown = [m for m in selected if m not in REGISTRY]
    if unknown:
        raise InvalidParameterError(f"unknown measures: {', '.join(unknown)}")
    ordered = [m for m in MEASURES if m in selected]
    results = []
    for measure in ordered:
        try:
            res = REGISTRY[measure](graph, config)
        except NonConvergenceError as exc:
            res = exc.partial
            res.error = str(exc)
        except InfluenceNetError as exc:
            res = CentralityResult(measure, np.zeros(graph.node_count), False, 0, math.inf, str(exc))
        results.append(res)
    return results
