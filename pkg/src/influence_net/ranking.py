"""Per-measure rankings and cross-measure aggregation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .centrality import CentralityResult
from .errors import InconsistentInputError, InvalidParameterError


@dataclass(frozen=True)
class RankEntry:
    node: int
    label: str
    score: float
    rank: float


@dataclass(frozen=True)
class RankTable:
    measure: str
    entries: tuple[RankEntry, ...]

    def rank_of(self) -> dict[int, float]:
        return {e.node: e.rank for e in self.entries}

    @property
    def nodes(self) -> frozenset[int]:
        return frozenset(e.node for e in self.entries)

    @property
    def members(self) -> frozenset[tuple[int, str]]:
        return frozenset((e.node, e.label) for e in self.entries)


@dataclass(frozen=True)
class TopK:
    nodes: list[int]
    overflow: bool


@dataclass(frozen=True)
class AggregateRow:
    node: int
    label: str
    appearances: int
    mean_rank: float
    points: float = 0.0


@dataclass(frozen=True)
class AggregateRanking:
    method: str
    k: int
    rows: tuple[AggregateRow, ...]

    def top(self, count: int | None = None) -> list[AggregateRow]:
        return list(self.rows[: self.k if count is None else count])


def rank(result: CentralityResult, labels: Sequence[str], decimals: int | None = None) -> RankTable:
    """Rank nodes by descending score; tied scores share their average rank.

    ``decimals`` rounds scores before tie detection, which merges
    iteration noise in the last few bits (rounding is monotone, so the
    order is never inverted).
    """
    scores = np.asarray(result.scores, dtype=float)
    if len(scores) != len(labels):
        raise InconsistentInputError(f"{len(scores)} scores for {len(labels)} labels")
    if not np.all(np.isfinite(scores)):
        raise InvalidParameterError(f"{result.measure}: scores must be finite")
    keyed = np.round(scores, decimals) if decimals is not None else scores
    order = sorted(range(len(scores)), key=lambda i: (-keyed[i], labels[i]))
    ranks = [0.0] * len(scores)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and keyed[order[j + 1]] == keyed[order[i]]:
            j += 1
        shared = (i + 1 + j + 1) / 2.0
        for pos in range(i, j + 1):
            ranks[order[pos]] = shared
        i = j + 1
    entries = tuple(RankEntry(i, labels[i], float(keyed[i]), ranks[i]) for i in order)
    return RankTable(result.measure, entries)


def top_k(table: RankTable, k: int) -> TopK:
    """First ``k`` entries, extended to the end of any tie group cut by the boundary."""
    if k < 1:
        raise InvalidParameterError(f"k must be at least 1, got {k}")
    entries = table.entries
    if k >= len(entries):
        return TopK([e.node for e in entries], False)
    cut = k
    while cut < len(entries) and entries[cut].rank == entries[k - 1].rank:
        cut += 1
    return TopK([e.node for e in entries[:cut]], cut > k)


def _check_same_nodes(tables: Sequence[RankTable]) -> dict[int, str]:
    if not tables:
        raise InconsistentInputError("at least one rank table is required")
    reference = tables[0].members
    for t in tables[1:]:
        if t.members != reference:
            raise InconsistentInputError(f"rank table {t.measure!r} covers a different node set")
    return {e.node: e.label for e in tables[0].entries}


def _mean_ranks(tables: Sequence[RankTable], labels: dict[int, str]) -> dict[int, float]:
    # sum in a fixed (measure name) order so results do not depend on list order
    ordered = sorted(tables, key=lambda t: t.measure)
    maps = [t.rank_of() for t in ordered]
    return {v: sum(m[v] for m in maps) / len(maps) for v in labels}


def _points(tables: Sequence[RankTable], labels: dict[int, str]) -> dict[int, float]:
    n = len(labels)
    maps = [t.rank_of() for t in sorted(tables, key=lambda t: t.measure)]
    return {v: sum(n - m[v] for m in maps) for v in labels}


def _appearances(tables: Sequence[RankTable], k: int, labels: dict[int, str]) -> dict[int, int]:
    counts = dict.fromkeys(labels, 0)
    for t in tables:
        for v in top_k(t, k).nodes:
            counts[v] += 1
    return counts


def aggregate(tables: Sequence[RankTable], k: int = 10) -> AggregateRanking:
    """Count top-k appearances per node; break ties by mean rank over all tables, then label."""
    if k < 1:
        raise InvalidParameterError(f"k must be at least 1, got {k}")
    labels = _check_same_nodes(tables)
    counts = _appearances(tables, k, labels)
    means = _mean_ranks(tables, labels)
    points = _points(tables, labels)
    rows = sorted(
        (AggregateRow(v, labels[v], counts[v], means[v], points[v]) for v in labels),
        key=lambda r: (-r.appearances, r.mean_rank, r.label),
    )
    return AggregateRanking("appearances", k, tuple(rows))


def borda(tables: Sequence[RankTable], k: int = 10) -> AggregateRanking:
    """Sum ``n - rank`` over tables; ``k`` only sets the reported top and appearance counts."""
    if k < 1:
        raise InvalidParameterError(f"k must be at least 1, got {k}")
    labels = _check_same_nodes(tables)
    counts = _appearances(tables, k, labels)
    means = _mean_ranks(tables, labels)
    points = _points(tables, labels)
    rows = sorted(
        (AggregateRow(v, labels[v], counts[v], means[v], points[v]) for v in labels),
        key=lambda r: (-r.points, r.mean_rank, r.label),
    )
    return AggregateRanking("borda", k, tuple(rows))


AGGREGATORS = {"appearances": aggregate, "borda": borda}
