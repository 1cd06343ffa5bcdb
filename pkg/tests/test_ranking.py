import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from influence_net.centrality import CentralityResult
from influence_net.errors import InconsistentInputError, InvalidParameterError
from influence_net.ranking import aggregate, borda, rank, top_k


def table(scores: dict[str, float], measure: str = "m"):
    labels = sorted(scores)
    return rank(CentralityResult(measure, np.array([scores[x] for x in labels])), labels)


def ranks(t):
    return {e.label: e.rank for e in t.entries}


def test_rank_fractional_ties_and_display_order():
    t = table({"A": 0.5, "B": 0.3, "C": 0.3})
    assert ranks(t) == {"A": 1, "B": 2.5, "C": 2.5}
    assert [e.label for e in t.entries] == ["A", "B", "C"]


def test_rank_full_tie():
    assert set(ranks(table({x: 1.0 for x in "ABCD"})).values()) == {2.5}


def test_rank_single():
    assert ranks(table({"A": 0.0})) == {"A": 1}


def test_rank_rounding_merges_noise():
    labels = ["A", "B"]
    res = CentralityResult("m", np.array([0.5773502691896258, 0.5773502691896257]))
    assert [e.rank for e in rank(res, labels).entries] == [1, 2]
    assert [e.rank for e in rank(res, labels, decimals=12).entries] == [1.5, 1.5]


def test_rank_rejects_non_finite():
    with pytest.raises(InvalidParameterError):
        rank(CentralityResult("m", np.array([np.nan])), ["A"])


def test_top_k_no_ties():
    assert top_k(table({"A": 3, "B": 2, "C": 1}), 2).nodes == [0, 1]


def test_top_k_boundary_tie_overflows():
    result = top_k(table({"A": 3, "B": 2, "C": 2}), 2)
    assert result.nodes == [0, 1, 2] and result.overflow


def test_top_k_saturates():
    result = top_k(table({"A": 3, "B": 2}), 5)
    assert result.nodes == [0, 1] and not result.overflow


def test_top_k_rejects_zero():
    with pytest.raises(InvalidParameterError):
        top_k(table({"A": 1}), 0)


def test_aggregate_unanimous():
    tables = [table({"A": 3, "B": 2, "C": 1}, f"m{i}") for i in range(3)]
    row = aggregate(tables, k=1).rows[0]
    assert (row.label, row.appearances, row.mean_rank) == ("A", 3, 1.0)


def test_aggregate_mean_rank_over_all_measures():
    t1 = table({"A": 3, "B": 2, "C": 1}, "m1")
    t2 = table({"A": 1, "B": 2, "C": 3}, "m2")
    rows = {r.label: r for r in aggregate([t1, t2], k=1).rows}
    assert rows["A"].appearances == 1 and rows["A"].mean_rank == 2.0
    assert rows["B"].appearances == 0 and rows["B"].mean_rank == 2.0
    assert [r.label for r in aggregate([t1, t2], k=1).rows] == ["A", "C", "B"]


def test_aggregate_mismatched_nodes():
    with pytest.raises(InconsistentInputError):
        aggregate([table({"A": 1, "B": 2}), table({"A": 1, "C": 2})])
    with pytest.raises(InconsistentInputError):
        aggregate([])


def test_borda_unanimous():
    tables = [table({"A": 2, "B": 1}, f"m{i}") for i in range(2)]
    points = {r.label: r.points for r in borda(tables).rows}
    assert points == {"A": 2, "B": 0}


def test_borda_full_ties():
    tables = [table({x: 1.0 for x in "ABC"}, f"m{i}") for i in range(3)]
    assert len({r.points for r in borda(tables).rows}) == 1


def test_borda_dissenting_measure():
    # per-measure points n - rank: m1, m2 give A2 B1 C0; m3 gives C2 B1 A0
    tables = [
        table({"A": 3, "B": 2, "C": 1}, "m1"),
        table({"A": 3, "B": 2, "C": 1}, "m2"),
        table({"A": 1, "B": 2, "C": 3}, "m3"),
    ]
    rows = borda(tables).rows
    assert [(r.label, r.points) for r in rows] == [("A", 4), ("B", 3), ("C", 2)]


scores_strategy = st.lists(st.integers(-5, 5), min_size=1, max_size=12)


@settings(max_examples=100, deadline=None)
@given(scores_strategy)
def test_ranks_sum_and_monotone_invariance(values):
    labels = [f"n{i:02d}" for i in range(len(values))]
    x = np.array(values, dtype=float)
    base = rank(CentralityResult("m", x), labels)
    n = len(values)
    assert sum(e.rank for e in base.entries) == n * (n + 1) / 2
    for f in (lambda v: np.exp(v), lambda v: 3 * v + 1, lambda v: v**3):
        other = rank(CentralityResult("m", f(x)), labels)
        assert [(e.node, e.rank) for e in other.entries] == [(e.node, e.rank) for e in base.entries]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(0, 4), min_size=5, max_size=5), min_size=1, max_size=6), st.data())
def test_aggregators_permutation_invariant(score_lists, data):
    labels = list("ABCDE")
    tables = [rank(CentralityResult(f"m{i}", np.array(s, dtype=float)), labels) for i, s in enumerate(score_lists)]
    shuffled = data.draw(st.permutations(tables))
    k = data.draw(st.integers(1, 5))
    assert aggregate(tables, k) == aggregate(shuffled, k)
    assert borda(tables, k) == borda(shuffled, k)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=1, max_size=8), st.integers(1, 8))
def test_single_table_aggregate_matches_top_k(values, k):
    labels = [f"n{i}" for i in range(len(values))]
    t = rank(CentralityResult("m", np.array(values, dtype=float)), labels)
    agg = aggregate([t], k)
    members = {r.node for r in agg.rows if r.appearances == 1}
    assert members == set(top_k(t, k).nodes)
    assert [r.node for r in agg.rows[: len(members)]] == top_k(t, k).nodes
