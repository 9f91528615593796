"""Counting motifs and cliques on a small random graph.

Run with ``python demos/01_quickstart.py``.
"""

from __future__ import annotations

import itertools
import random

from patternmine import DataGraph, clique_count, motif_count, motif_name
from patternmine.plan import explain_plan, generate_plan
from patternmine.pattern import Pattern


def random_graph(n: int, p: float, seed: int) -> DataGraph:
    rng = random.Random(seed)
    return DataGraph.from_edges((u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p)


def main() -> None:
    g = random_graph(60, 0.15, seed=7)
    print(f"graph: {g.vertex_count} vertices, {g.edge_count} edges")

    # Every connected 4-vertex shape, counted vertex-induced: each 4-vertex
    # subset lands in exactly one row.
    print("\n4-vertex motifs")
    for pattern, n in motif_count(4, g).items():
        print(f"  {motif_name(pattern):16s} {n}")

    print("\ncliques")
    for k in (3, 4, 5):
        print(f"  clique{k} {clique_count(k, g)}")

    # A pattern is compiled into a plan before matching. The diamond is a
    # 4-cycle with one chord; its two symmetric pairs get ordered so that
    # each diamond is found once, and only the chord endpoints are matched by
    # traversal (the core). The other two vertices come from set operations.
    diamond = Pattern.from_edges([(1, 2), (2, 3), (3, 4), (4, 1), (2, 4)])
    print("\nplan for the diamond")
    print(explain_plan(generate_plan(diamond)))


if __name__ == "__main__":
    main()
