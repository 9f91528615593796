"""Reference explorer for tests.

Grows connected vertex sets one vertex at a time, drops repeats with an
explicit canonicality check, then checks each full set against the pattern
by trying every assignment. Anti-edge and anti-vertex constraints are
evaluated straight from their definitions. This is slow on purpose and
shares no code with the plan or the matcher.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .datagraph import DataGraph
from .pattern import Pattern

__all__ = [
    "OracleCounters",
    "ScaleError",
    "brute_force_matches",
    "match_key",
    "explore",
    "explore_edges",
    "brute_force_mni",
    "instrumentation_counters",
    "MAX_GRAPH_VERTICES",
    "MAX_PATTERN_VERTICES",
]

MAX_GRAPH_VERTICES = 14
MAX_PATTERN_VERTICES = 6


class ScaleError(ValueError):
    """Input too large for brute force."""


@dataclass
class OracleCounters:
    partial_matches: int = 0
    canonicality_checks: int = 0
    isomorphism_checks: int = 0
    pruned: int = 0


def instrumentation_counters(counters: OracleCounters) -> dict[str, int]:
    return {
        "partial_matches": counters.partial_matches,
        "canonicality_checks": counters.canonicality_checks,
        "isomorphism_checks": counters.isomorphism_checks,
    }


def match_key(pattern: Pattern, mapping: dict[int, int], vertex_induced: bool = False):
    """Identify a match up to automorphisms of ``pattern``.

    Two mappings get the same key exactly when one is the other composed with
    an automorphism: the key records the image of every true edge, every
    anti-edge between regular vertices, every labeled vertex, and the
    neighbour-image of every anti-vertex. For vertex-induced matches every
    non-adjacent regular pair counts as anti-adjacent.
    """
    anti_v = set(pattern.anti_vertices)
    regular = pattern.regular_vertices
    true_img = frozenset(frozenset((mapping[a], mapping[b])) for a, b in pattern.true_edges)
    if vertex_induced:
        anti_pairs = [
            (a, b) for a, b in itertools.combinations(regular, 2) if not pattern.are_connected(a, b)
        ]
    else:
        anti_pairs = [(a, b) for a, b in pattern.anti_edges if a not in anti_v and b not in anti_v]
    anti_img = frozenset(frozenset((mapping[a], mapping[b])) for a, b in anti_pairs)
    lab_img = frozenset((mapping[u], l) for u, l in pattern.label_items if u not in anti_v)
    av_img = tuple(
        sorted(
            (
                (-1 if pattern.label(a) is None else pattern.label(a)),
                tuple(sorted(mapping[u] for u in pattern.anti_neighbors(a))),
            )
            for a in anti_v
        )
    )
    return (true_img, anti_img, lab_img, av_img)


def explore(graph: DataGraph, size: int, counters: OracleCounters | None = None, starts=None):
    """Connected vertex sets of ``size`` vertices, grown step by step.

    Every extension is counted as a partial match and checked for
    canonicality (here: whether the same vertex set was already produced).
    """
    counters = counters if counters is not None else OracleCounters()
    adj = graph.adj_sets
    seen: set[frozenset] = set()
    level = []
    for v in starts if starts is not None else range(graph.vertex_count):
        counters.partial_matches += 1
        counters.canonicality_checks += 1
        s = frozenset((v,))
        if s in seen:
            counters.pruned += 1
            continue
        seen.add(s)
        level.append(s)
    for _ in range(size - 1):
        nxt = []
        for s in level:
            border = set().union(*(adj[v] for v in s)) - s
            for w in sorted(border):
                counters.partial_matches += 1
                counters.canonicality_checks += 1
                t = s | {w}
                if t in seen:
                    counters.pruned += 1
                    continue
                seen.add(t)
                nxt.append(t)
        level = nxt
    return level


def explore_edges(graph: DataGraph, size: int, counters: OracleCounters | None = None, starts=None):
    """Connected edge sets with ``size`` edges, grown one edge at a time."""
    counters = counters if counters is not None else OracleCounters()
    adj = graph.adj
    seen: set[frozenset] = set()
    level = []
    for v in starts if starts is not None else range(graph.vertex_count):
        for w in adj[v]:
            counters.partial_matches += 1
            counters.canonicality_checks += 1
            e = frozenset((frozenset((v, w)),))
            if e in seen:
                counters.pruned += 1
                continue
            seen.add(e)
            level.append(e)
    for _ in range(size - 1):
        nxt = []
        for es in level:
            verts = {x for e in es for x in e}
            for v in sorted(verts):
                for w in adj[v]:
                    e = frozenset((v, w))
                    if e in es:
                        continue
                    counters.partial_matches += 1
                    counters.canonicality_checks += 1
                    t = es | {e}
                    if t in seen:
                        counters.pruned += 1
                        continue
                    seen.add(t)
                    nxt.append(t)
        level = nxt
    return level


class _Checker:
    """The pattern's constraints, unpacked once per oracle run."""

    def __init__(self, pattern: Pattern, vertex_induced: bool):
        self.regular = pattern.regular_vertices
        self.labels = [(u, l) for u, l in pattern.label_items if u in set(self.regular)]
        self.present = sorted(pattern.true_edges)
        self.absent = [
            (a, b)
            for a, b in itertools.combinations(self.regular, 2)
            if not pattern.are_connected(a, b)
            and (vertex_induced or pattern.are_anti_adjacent(a, b))
        ]
        self.anti_vertices = [
            (
                pattern.label(a),
                [(u, tuple(pattern.neighbors(u))) for u in sorted(pattern.anti_neighbors(a))],
            )
            for a in pattern.anti_vertices
        ]

    def __call__(self, m: dict[int, int], graph: DataGraph) -> bool:
        adj = graph.adj_sets
        for u, l in self.labels:
            if graph.labels is None or graph.labels[m[u]] != l:
                return False
        for a, b in self.present:
            if m[b] not in adj[m[a]]:
                return False
        for a, b in self.absent:
            if m[b] in adj[m[a]]:
                return False
        for label, nbrs in self.anti_vertices:
            # a violating vertex is adjacent to every neighbour image and is
            # not one of that neighbour's own matched pattern-neighbours
            for x in range(graph.vertex_count):
                if label is not None and graph.labels[x] != label:
                    continue
                if all(x in adj[m[u]] and all(x != m[w] for w in own) for u, own in nbrs):
                    return False
        return True


def brute_force_matches(
    pattern: Pattern,
    graph: DataGraph,
    mode: str = "edge",
    counters: OracleCounters | None = None,
) -> dict:
    """Map each match class (see :func:`match_key`) to its smallest mapping.

    The representative is the mapping whose tuple of images, in pattern
    vertex order, is lexicographically smallest.
    """
    if graph.vertex_count > MAX_GRAPH_VERTICES:
        raise ScaleError("brute force is limited to small graphs")
    if len(pattern.regular_vertices) > MAX_PATTERN_VERTICES:
        raise ScaleError("brute force is limited to small patterns")
    vertex_induced = mode in ("vertex", "vertex_induced")
    counters = counters if counters is not None else OracleCounters()
    regular = pattern.regular_vertices
    check = _Checker(pattern, vertex_induced)
    out: dict = {}
    for s in explore(graph, len(regular), counters):
        counters.isomorphism_checks += 1
        for perm in itertools.permutations(sorted(s)):
            m = dict(zip(regular, perm))
            if not check(m, graph):
                continue
            key = match_key(pattern, m, vertex_induced)
            rep = out.get(key)
            if rep is None or perm < rep:
                out[key] = perm
    return {k: dict(zip(regular, v)) for k, v in out.items()}


def brute_force_mni(pattern: Pattern, graph: DataGraph) -> int:
    """MNI support of ``pattern`` from every edge-induced embedding.

    No representatives here: each pattern vertex collects its image under
    every injective, label-respecting, edge-preserving map.
    """
    if graph.vertex_count > MAX_GRAPH_VERTICES:
        raise ScaleError("brute force is limited to small graphs")
    regular = pattern.regular_vertices
    check = _Checker(pattern, vertex_induced=False)
    domains: dict[int, set[int]] = {u: set() for u in regular}
    for perm in itertools.permutations(range(graph.vertex_count), len(regular)):
        m = dict(zip(regular, perm))
        if check(m, graph):
            for u in regular:
                domains[u].add(m[u])
    return min((len(d) for d in domains.values()), default=0)
