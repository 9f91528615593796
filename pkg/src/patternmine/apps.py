"""Mining applications built on the matcher and the aggregator.

Each function is a short driver: choose patterns, run the matcher, fold the
matches. Parallelism comes from the ``threads`` argument that is passed down
to :func:`~patternmine.matcher.run_plan`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .aggregation import Aggregator, DomainMap, copy_domain_table, merge_domain_tables
from .datagraph import DataGraph
from .matcher import Control, MatcherStats, count, match_all, prepare, run_plan
from .pattern import (
    EDGE_INDUCED_CAP,
    Pattern,
    PatternError,
    canonical_form,
    canonical_pattern,
    extend_by_edge,
    generate_all_vertex_induced,
    generate_chain,
    generate_clique,
    generate_star,
    load_patterns,
    parse_patterns,
)
from .plan import orbit_partition

__all__ = [
    "ConfigurationError",
    "motif_count",
    "motif_name",
    "clique_count",
    "FsmResult",
    "fsm",
    "pattern_match",
    "exists",
    "exists_clique",
    "triplet_count",
    "cc_bound",
]


class ConfigurationError(ValueError):
    """The graph or the arguments do not fit the requested application."""


# ---------------------------------------------------------------------------
# motifs and cliques
# ---------------------------------------------------------------------------

_NAMED = {
    "path3": generate_chain(3),
    "triangle": generate_clique(3),
    "path4": generate_chain(4),
    "star4": generate_star(4),
    "cycle4": Pattern.from_edges([(1, 2), (2, 3), (3, 4), (1, 4)]),
    "tailed-triangle": Pattern.from_edges([(1, 2), (2, 3), (1, 3), (3, 4)]),
    "diamond": Pattern.from_edges([(1, 2), (2, 3), (3, 4), (1, 4), (1, 3)]),
    "clique4": generate_clique(4),
}
_NAMES_BY_CODE: dict[bytes, str] | None = None


def motif_name(p: Pattern) -> str:
    """Short name for an unlabeled motif; 5-vertex ones are ``m5-<index>``
    in canonical-code order, anything else falls back to the code."""
    global _NAMES_BY_CODE
    if _NAMES_BY_CODE is None:
        names = {q.canonical_code(): name for name, q in _NAMED.items()}
        for i, q in enumerate(generate_all_vertex_induced(5)):
            names[q.canonical_code()] = f"m5-{i}"
        _NAMES_BY_CODE = names
    code = p.canonical_code()
    return _NAMES_BY_CODE.get(code, code.decode("ascii"))


def motif_count(k: int, graph: DataGraph, threads: int = 1) -> dict[Pattern, int]:
    """Vertex-induced count of every connected ``k``-vertex motif, 3 <= k <= 5.

    Keys are canonical patterns, ordered by edge count and then by code.
    """
    if not 3 <= k <= 5:
        raise ConfigurationError(f"motif size must be between 3 and 5, got {k}")
    patterns = sorted(generate_all_vertex_induced(k), key=lambda p: (p.num_edges, p.canonical_code()))
    return {p: count(p, graph, "vertex", threads) for p in patterns}


def clique_count(k: int, graph: DataGraph, threads: int = 1) -> int:
    if k < 3:
        raise ConfigurationError(f"clique size must be at least 3, got {k}")
    return count(generate_clique(k), graph, "edge", threads)


# ---------------------------------------------------------------------------
# frequent subgraph mining
# ---------------------------------------------------------------------------


@dataclass
class FsmResult:
    """Outcome of :func:`fsm`.

    ``frequent`` maps canonical code to ``(pattern, support)`` for every
    frequent labeled pattern. ``supports`` holds the support of every labeled
    pattern that was seen, frequent or not, and ``steps`` the ``(parent,
    child)`` code pairs of each extension, for checking anti-monotonicity.
    """

    frequent: dict = field(default_factory=dict)
    supports: dict = field(default_factory=dict)
    steps: list = field(default_factory=list)

    def table(self) -> list[tuple[bytes, int]]:
        return sorted((code, s) for code, (_, s) in self.frequent.items())


class _LabelDiscovery:
    """Callback that bins matches by the labels they carry.

    A match of a partly labeled pattern ``q`` gets the data labels written onto
    ``q``; the canonical code of the result is the bin, and the matched data
    vertices go into that bin's domain map at their canonical positions.
    Domains are merged over automorphism orbits of the labeled pattern, which
    turns one-match-per-class into the full MNI domain.
    """

    def __init__(self, q: Pattern, agg: Aggregator, compressed: bool):
        self.q = q
        self.regular = q.regular_vertices
        self.agg = agg
        self.compressed = compressed
        self.keys: dict[tuple, tuple] = {}
        self.patterns: dict[bytes, Pattern] = {}

    def _key(self, labels: tuple):
        hit = self.keys.get(labels)
        if hit is None:
            labeled = self.q.with_labels(dict(zip(self.regular, labels)))
            canon, code, perm = canonical_pattern(labeled)
            orbits = [o for o in orbit_partition(canon) if o[0] in canon.regular_vertices]
            hit = (code, perm, canon, orbits)
            self.keys[labels] = hit
        return hit

    def __call__(self, match, ctx) -> None:
        code, perm, canon, orbits = self._key(tuple(match.labels[u] for u in self.regular))
        slot = self.agg.slots[ctx.worker_id]
        dm = slot.local.get(code)
        if dm is None:
            dm = slot.local[code] = DomainMap(canon.n, orbits, self.compressed)
            self.patterns.setdefault(code, canon)
        data = match.data_vertices
        for u in self.regular:
            dm.add(perm[u], data[u - 1])
        slot.tick()


def _discover(q: Pattern, graph: DataGraph, threads: int, compressed: bool) -> tuple[dict, dict]:
    agg = Aggregator(threads, dict, merge_domain_tables, copy_domain_table, publish_every=4096)
    cb = _LabelDiscovery(q, agg, compressed)
    with agg:
        match_all(q, graph, cb, "edge", threads)
    return agg.value, cb.patterns


def fsm(
    graph: DataGraph,
    max_edges: int,
    tau: int,
    threads: int = 1,
    compressed: bool = False,
) -> FsmResult:
    """Labeled patterns with at most ``max_edges`` edges and MNI support >= ``tau``.

    Starts from the unlabeled edge, discovers labels from the matches, keeps
    the frequent labeled patterns, grows each by one edge (new vertices come
    unlabeled and get labels discovered on the next run) and repeats.
    Matching is edge-induced throughout.
    """
    if graph.labels is None:
        raise ConfigurationError("frequent subgraph mining needs a labeled graph")
    if tau < 1:
        raise ConfigurationError(f"tau must be at least 1, got {tau}")
    if not 1 <= max_edges <= EDGE_INDUCED_CAP:
        raise ConfigurationError(f"max_edges must be in 1..{EDGE_INDUCED_CAP}")
    result = FsmResult()
    # each candidate carries the codes of the frequent patterns it grew from
    frontier: list[tuple[Pattern, list[bytes]]] = [(generate_chain(2), [])]
    for _ in range(max_edges):
        level: dict[bytes, tuple[Pattern, int]] = {}
        for q, parents in frontier:
            table, patterns = _discover(q, graph, threads, compressed)
            for code, dm in table.items():
                s = dm.support()
                level[code] = (patterns[code], s)
                result.supports[code] = s
                result.steps.extend((parent, code) for parent in parents)
        frequent = {c: v for c, v in level.items() if v[1] >= tau}
        result.frequent.update(frequent)
        if not frequent:
            break
        children: dict[bytes, tuple[Pattern, list[bytes]]] = {}
        for code in sorted(frequent):
            for child in extend_by_edge([frequent[code][0]]):
                entry = children.setdefault(canonical_form(child)[0], (child, []))
                entry[1].append(code)
        frontier = [children[c] for c in sorted(children)]
    return result


# ---------------------------------------------------------------------------
# pattern matching and existence queries
# ---------------------------------------------------------------------------


def _read_patterns(patterns) -> list[Pattern]:
    if isinstance(patterns, str):
        if "\n" in patterns:
            return parse_patterns(patterns)
        return load_patterns(patterns)
    if hasattr(patterns, "__fspath__"):
        return load_patterns(patterns)
    return list(patterns)


def pattern_match(
    patterns,
    graph: DataGraph,
    mode: str = "edge",
    threads: int = 1,
    symmetry_breaking: bool = True,
) -> list[tuple[Pattern, int]]:
    """Count every pattern; ``patterns`` is a file path, pattern text or a list.

    Errors name the zero-based index of the offending pattern.
    """
    out = []
    for i, p in enumerate(_read_patterns(patterns)):
        try:
            p.validate()
        except PatternError as exc:
            raise PatternError(f"pattern {i}: {exc}") from None
        out.append((p, count(p, graph, mode, threads, symmetry_breaking)))
    return out


def exists(
    pattern: Pattern,
    graph: DataGraph,
    mode: str = "edge",
    threads: int = 1,
) -> tuple[bool, MatcherStats]:
    """Stop at the first match. Returns whether one exists plus the stats."""
    control = Control()

    def first(match, ctx) -> None:
        ctx.stop()

    stats = run_plan(prepare(pattern, mode), graph, first, threads, control)
    return stats.matches > 0, stats


def exists_clique(k: int, graph: DataGraph, threads: int = 1) -> bool:
    if k < 2:
        raise ConfigurationError(f"clique size must be at least 2, got {k}")
    return exists(generate_clique(k), graph, "edge", threads)[0]


# ---------------------------------------------------------------------------
# clustering coefficient
# ---------------------------------------------------------------------------


def triplet_count(graph: DataGraph, threads: int = 1) -> int:
    """Edge-induced matches of the 3-vertex star (one per wedge)."""
    return count(generate_star(3), graph, "edge", threads)


def cc_bound(graph: DataGraph, bound: float, threads: int = 1) -> bool:
    """Whether the global clustering coefficient is at least ``bound``.

    GCC is ``3 t / s`` with ``t`` triangles and ``s`` wedges. Triangles are
    counted only until ``3 t >= bound * s`` is certain. A graph without
    wedges has GCC 0.
    """
    if not 0 <= bound <= 1:
        raise ConfigurationError(f"bound must be in [0, 1], got {bound}")
    wedges = triplet_count(graph, threads)
    if wedges == 0:
        return bound <= 0
    target = Fraction(bound) * wedges
    if target <= 0:
        return True
    control = Control()

    def reached(total: int) -> None:
        if 3 * total >= target:
            control.stop_exploration()

    agg: Aggregator[int] = Aggregator(threads, int, lambda a, b: a + b, on_update=reached)

    def tally(match, ctx) -> None:
        slot = agg.slots[ctx.worker_id]
        slot.local += 1
        slot.tick()
        # one worker's own count is a lower bound on the total
        if 3 * slot.local >= target:
            ctx.stop()

    with agg:
        run_plan(prepare(generate_clique(3), "edge"), graph, tally, threads, control)
    return 3 * agg.value >= target
