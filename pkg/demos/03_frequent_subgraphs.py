"""Frequent subgraph mining with MNI support.

Labels are not known up front: the unlabeled edge is matched, every match is
binned by the labels it carries, and each bin keeps one bitmap per pattern
vertex. The support of a labeled pattern is the smallest number of distinct
data vertices any of its vertices was mapped to. Frequent patterns grow by
one edge and the loop repeats.
"""

from __future__ import annotations

import itertools
import random

from patternmine import DataGraph, fsm
from patternmine.pattern import format_pattern


def main() -> None:
    rng = random.Random(3)
    edges = [(u, v) for u, v in itertools.combinations(range(40), 2) if rng.random() < 0.12]
    labels = {v: rng.randrange(3) for e in edges for v in e}
    g = DataGraph.from_edges(edges, labels)
    print(f"graph: {g.vertex_count} vertices, {g.edge_count} edges, 3 labels")

    tau = 12
    result = fsm(g, max_edges=3, tau=tau, threads=2)
    print(f"\n{len(result.frequent)} patterns with support >= {tau}")
    for code, (pattern, support) in sorted(result.frequent.items(), key=lambda kv: -kv[1][1])[:6]:
        print(f"\nsupport {support}  ({code.decode()})")
        print(format_pattern(pattern))

    # support never grows when a pattern grows
    worst = min(result.supports[a] - result.supports[b] for a, b in result.steps)
    print(f"\nsmallest parent-minus-child support over {len(result.steps)} steps: {worst}")


if __name__ == "__main__":
    main()
