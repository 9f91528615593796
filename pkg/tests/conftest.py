from __future__ import annotations

import itertools
import os
import random

import pytest

from patternmine.datagraph import DataGraph, load_graph
from patternmine.pattern import Pattern, generate_all_vertex_induced

P = Pattern.from_edges


def gnp(n: int, p: float, rng: random.Random, n_labels: int | None = None) -> DataGraph:
    """G(n, p) over vertices 0..n-1 (isolated vertices are dropped)."""
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    labels = None
    if n_labels is not None:
        labels = {v: rng.randrange(n_labels) for e in edges for v in e}
    return DataGraph.from_edges(edges, labels)


def complete(n: int) -> DataGraph:
    return DataGraph.from_edges(itertools.combinations(range(n), 2))


def star_graph(leaves: int) -> DataGraph:
    return DataGraph.from_edges((0, i) for i in range(1, leaves + 1))


def cycle_graph(n: int) -> DataGraph:
    return DataGraph.from_edges((i, (i + 1) % n) for i in range(n))


# The constrained patterns used throughout: anti-edges closing squares and
# anti-vertices hanging off edges, paths and triangles.
CONSTRAINED = {
    "p_a": P([(1, 2), (2, 3), (3, 4), (4, 1)], [(2, 4)]),
    "p_b": P([(1, 2), (2, 3), (3, 4), (4, 1)], [(1, 3), (2, 4)]),
    "p_c": P([(1, 2)], [(1, 3), (2, 3)]),
    "p_d": P([(1, 2), (2, 3)], [(2, 4)]),
    "p_e": P([(1, 2), (2, 3), (1, 3)], [(1, 4), (3, 4)]),
    "p_f": P([(1, 2), (2, 3)], [(1, 4), (2, 4), (2, 5)]),
    "p_g": P([(1, 2), (2, 3), (1, 3)], [(1, 4), (2, 4), (3, 4)]),
}

DIAMOND = P([(1, 2), (2, 3), (3, 4), (4, 1), (2, 4)])


def small_patterns() -> list[Pattern]:
    """Every connected pattern on 2..4 vertices plus the constrained ones."""
    out = []
    for k in (2, 3, 4):
        out += generate_all_vertex_induced(k)
    return out + list(CONSTRAINED.values())


def instance_suite(count: int = 200, seed: int = 1) -> list[DataGraph]:
    """Random graphs G(n <= 12, p in {0.2, 0.5, 0.8}) with at least one edge."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        g = gnp(rng.randint(4, 12), rng.choice([0.2, 0.5, 0.8]), rng)
        if g.vertex_count >= 2:
            out.append(g)
    return out


def env_graph(var: str) -> DataGraph | None:
    path = os.environ.get(var)
    if not path or not os.path.exists(path):
        return None
    return load_graph(path)


@pytest.fixture
def rng():
    return random.Random(12345)
