import sys
from pathlib import Path

import numpy as np
import pytest

from influence_net.graph import InfluenceGraph
from influence_net.ingest import THEORY_CODES

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"
CODES = sorted(THEORY_CODES)


def random_graph(
    rng: np.random.Generator,
    n: int,
    p: float,
    weighted: bool,
    strongly_connected: bool = False,
) -> InfluenceGraph:
    """Random directed graph built through ``merge_edge``.

    Weighted graphs get 1-3 distinct theory codes per edge, so weights are
    theory counts exactly as ingest produces them.
    """
    g = InfluenceGraph()
    for i in range(n):
        g.add_construct(f"c{i:02d}")
    pairs = set()
    if strongly_connected and n > 1:
        cycle = rng.permutation(n)
        pairs.update((int(cycle[i]), int(cycle[(i + 1) % n])) for i in range(n))
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p:
                pairs.add((u, v))
    for u, v in sorted(pairs):
        count = int(rng.integers(1, 4)) if weighted else 1
        for code in rng.choice(CODES, size=count, replace=False):
            g.merge_edge(u, v, int(code))
    return g


def graph_family(seed: int, count: int, strongly_connected: bool, max_nodes: int = 10):
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(2, max_nodes + 1))
        p = float(rng.uniform(0.1, 0.6))
        yield random_graph(rng, n, p, weighted=bool(i % 2), strongly_connected=strongly_connected)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
