"""Compile a pattern into an exploration plan.

The plan has three parts:

* a partial order on regular pattern vertices that leaves exactly one
  representative of every set of automorphic matches,
* the core: the subpattern induced by a minimum connected vertex cover, which
  is the only part matched by traversal,
* matching orders: totally ordered views of the core. Matching a core then
  reduces to finding increasing vertex sequences in the data graph.
"""

from __future__ import annotations

import itertools
from itertools import compress
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .pattern import (
    ANTI,
    TRUE,
    WILDCARD,
    Pattern,
    PatternValidationError,
    kind_matrix,
    label_vector,
    refine_colors,
)

__all__ = [
    "PartialOrder",
    "MatchingOrder",
    "NonCoreVertex",
    "AntiVertexCheck",
    "ExplorationPlan",
    "automorphisms",
    "find_automorphism",
    "break_symmetries",
    "min_connected_vertex_cover",
    "compute_matching_orders",
    "generate_plan",
    "explain_plan",
]


# ---------------------------------------------------------------------------
# automorphisms
# ---------------------------------------------------------------------------


class _AutSearch:
    """Backtracking search for kind- and label-preserving vertex bijections."""

    def __init__(self, p: Pattern):
        self.n = p.n
        self.kinds = kind_matrix(p)
        self.labels = label_vector(p)
        self.colors = refine_colors(p.n, self.kinds, self.labels)
        # mapping vertices most-constrained first keeps the search shallow
        self.order = sorted(range(1, p.n + 1), key=lambda u: (self.colors[u], u))

    def search(self, fixed: dict[int, int]):
        """Lazily yield automorphisms extending the partial map ``fixed``."""
        n, kinds, colors = self.n, self.kinds, self.colors
        if len(set(fixed.values())) != len(fixed):
            return
        for u, v in fixed.items():
            if colors[u] != colors[v]:
                return
        for a in fixed:
            for b in fixed:
                if kinds[a][b] != kinds[fixed[a]][fixed[b]]:
                    return
        sigma = dict(fixed)
        image = set(fixed.values())
        todo = [u for u in self.order if u not in sigma]

        def rec(i: int):
            if i == len(todo):
                yield dict(sigma)
                return
            u = todo[i]
            ku = kinds[u]
            for v in range(1, n + 1):
                if v in image or colors[v] != colors[u]:
                    continue
                kv = kinds[v]
                if all(ku[w] == kv[sigma[w]] for w in sigma):
                    sigma[u] = v
                    image.add(v)
                    yield from rec(i + 1)
                    del sigma[u]
                    image.discard(v)

        yield from rec(0)


def automorphisms(p: Pattern) -> list[dict[int, int]]:
    """All bijections of ``p`` preserving true edges, anti-edges and labels.

    Anti-edges count as their own edge kind, so anti-vertices only ever map to
    anti-vertices.
    """
    return list(_AutSearch(p).search({}))


def find_automorphism(p: Pattern, fixed: dict[int, int], _search=None) -> dict[int, int] | None:
    """One automorphism extending the partial map ``fixed``, or ``None``."""
    search = _search or _AutSearch(p)
    for sigma in search.search(fixed):
        return sigma
    return None


# ---------------------------------------------------------------------------
# symmetry breaking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PartialOrder:
    """Pairs ``(a, b)``: the data vertex matched to ``a`` precedes that of ``b``.

    Stored as a transitive reduction; :meth:`closure` gives the full relation.
    """

    constraints: frozenset = field(default_factory=frozenset)

    def closure(self) -> frozenset:
        return self._closure

    @cached_property
    def _closure(self) -> frozenset:
        rel = set(self.constraints)
        changed = True
        while changed:
            changed = False
            for a, b in list(rel):
                for c, d in list(rel):
                    if b == c and (a, d) not in rel:
                        rel.add((a, d))
                        changed = True
        return frozenset(rel)

    def restricted(self, vertices) -> frozenset:
        """Closure pairs with both ends in ``vertices``."""
        vs = set(vertices)
        return frozenset((a, b) for a, b in self.closure() if a in vs and b in vs)

    def is_satisfied(self, mapping: dict[int, int]) -> bool:
        return all(mapping[a] < mapping[b] for a, b in self.constraints)

    def __iter__(self):
        return iter(sorted(self.constraints))

    def __len__(self):
        return len(self.constraints)


def _reduce(pairs: set[tuple[int, int]]) -> frozenset:
    closure = PartialOrder(frozenset(pairs)).closure()
    nodes = {x for e in closure for x in e}
    keep = set()
    for a, b in closure:
        if not any((a, c) in closure and (c, b) in closure for c in nodes):
            keep.add((a, b))
    return frozenset(keep)


def break_symmetries(p: Pattern) -> PartialOrder:
    """Order symmetric regular vertices until only the identity is left.

    Each round takes the smallest vertex ``u`` of a largest non-trivial orbit
    of the current group, orders it before every other member of its orbit,
    and continues with the stabiliser of ``u``. The resulting constraints admit
    exactly one member of every orbit of matches.

    Anti-vertices take part in the automorphism search (so they can break
    symmetries) but are never constrained: they are not matched.
    """
    regular = p.regular_vertices
    search = _AutSearch(p)
    fixed: dict[int, int] = {}
    pairs: set[tuple[int, int]] = set()
    while True:
        orbits = _orbits(p, regular, fixed, search)
        big = [o for o in orbits if len(o) > 1]
        if not big:
            break
        size = max(len(o) for o in big)
        orbit = min((o for o in big if len(o) == size), key=min)
        u = min(orbit)
        pairs.update((u, v) for v in orbit if v != u)
        fixed[u] = u
    return PartialOrder(_reduce(pairs))


def _orbits(p: Pattern, regular, fixed: dict[int, int], search: _AutSearch) -> list[list[int]]:
    """Orbits of the regular vertices under the pointwise stabiliser of ``fixed``."""
    parent = {u: u for u in regular}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    colors = search.colors
    for u, v in itertools.combinations(regular, 2):
        if u in fixed or v in fixed or colors[u] != colors[v]:
            continue
        if find(u) == find(v):
            continue
        sigma = find_automorphism(p, {**fixed, u: v}, search)
        if sigma is not None:
            for a, b in sigma.items():
                if a in parent and b in parent:
                    ra, rb = find(a), find(b)
                    if ra != rb:
                        parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for u in regular:
        groups.setdefault(find(u), []).append(u)
    return [sorted(g) for g in groups.values()]


def orbit_partition(p: Pattern) -> list[list[int]]:
    """Orbits of all vertices of ``p`` under its automorphism group."""
    return _orbits(p, tuple(p.vertices), {}, _AutSearch(p))


# ---------------------------------------------------------------------------
# core
# ---------------------------------------------------------------------------


def min_connected_vertex_cover(p: Pattern) -> tuple[int, ...]:
    """Smallest set of regular vertices covering all true edges and all
    anti-edges between regular vertices, connected through true edges.

    Ties are broken by the lexicographically smallest vertex tuple. Anti-edges
    to anti-vertices do not need covering: anti-vertices are checked after
    the whole match is known.
    """
    regular = p.regular_vertices
    anti_v = set(p.anti_vertices)
    edges = list(p.true_edges) + [e for e in p.anti_edges if not (set(e) & anti_v)]
    adj: dict[int, set[int]] = {u: set() for u in regular}
    for a, b in p.true_edges:
        adj[a].add(b)
        adj[b].add(a)
    for k in range(1, len(regular) + 1):
        for cand in itertools.combinations(regular, k):
            s = set(cand)
            if all(a in s or b in s for a, b in edges) and _connected_in(s, adj):
                return cand
    raise PatternValidationError("pattern has no connected vertex cover")


def _connected_in(s: set[int], adj: dict[int, set[int]]) -> bool:
    start = next(iter(s))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w in s and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(s)


# ---------------------------------------------------------------------------
# matching orders
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatchingOrder:
    """A totally ordered view of the core.

    ``remapped_core`` renames each core vertex to its position (1-based) in
    the sequence. Several sequences can yield the same remapped core; they are
    kept together in ``sequences`` because each of them turns one match of
    the order into a distinct core match.
    """

    sequence: tuple[int, ...]
    remapped_core: Pattern
    sequences: tuple[tuple[int, ...], ...]

    @property
    def inverse_map(self) -> dict[int, int]:
        """Position (1-based) to original core vertex, for ``sequence``."""
        return {i + 1: u for i, u in enumerate(self.sequence)}

    @property
    def size(self) -> int:
        return len(self.sequence)


def _linear_extensions(vertices: tuple[int, ...], before: frozenset) -> np.ndarray:
    """Orderings of ``vertices`` consistent with ``before``, in lex order.

    Returned as an array of indices into ``sorted(vertices)``, one row per
    ordering. Prefixes are grown one position at a time for all rows at once.
    """
    vs = sorted(vertices)
    k = len(vs)
    index = {u: i for i, u in enumerate(vs)}
    need = [sum(1 << index[a] for a, b in before if b == u) for u in vs]
    seqs = np.zeros((1, 0), dtype=np.int64)
    placed = np.zeros(1, dtype=np.int64)
    for _ in range(k):
        grown, masks = [], []
        for i in range(k):
            ok = ((placed >> i) & 1 == 0) & (placed & need[i] == need[i])
            if ok.any():
                rows = seqs[ok]
                grown.append(np.hstack([rows, np.full((len(rows), 1), i, dtype=np.int64)]))
                masks.append(placed[ok] | 1 << i)
        seqs = np.vstack(grown)
        placed = np.concatenate(masks)
    if k:
        seqs = seqs[np.lexsort(seqs.T[::-1])]
    return seqs


def compute_matching_orders(
    pattern: Pattern, core_vertices: tuple[int, ...], po: PartialOrder
) -> list[MatchingOrder]:
    """Enumerate core sequences that respect ``po``; merge identical remaps."""
    vs = sorted(core_vertices)
    k = len(vs)
    seqs = _linear_extensions(tuple(vs), po.restricted(vs))
    kinds = np.array(kind_matrix(pattern))[np.ix_(vs, vs)]
    labels = np.array(label_vector(pattern))[vs]
    # the remapped core is fully described by the label at each position and
    # the edge kind of each position pair, so those columns are an exact key
    first, second = np.triu_indices(k, 1)
    keys = np.ascontiguousarray(np.hstack([labels[seqs], kinds[seqs[:, first], seqs[:, second]]]))
    packed = keys.view(np.dtype((np.void, keys.itemsize * keys.shape[1]))).ravel().tolist()
    ids = map(tuple, np.array(vs)[seqs].tolist())
    groups: dict[bytes, list] = {}
    heads: list[int] = []
    # sequences arrive in lex order, so groups come out ordered by their
    # first sequence
    for row, (key, seq) in enumerate(zip(packed, ids)):
        hit = groups.get(key)
        if hit is None:
            groups[key] = [seq]
            heads.append(row)
        else:
            hit.append(seq)
    head_keys = keys[heads]
    true_rows = (head_keys[:, k:] == TRUE).tolist()
    anti_rows = (head_keys[:, k:] == ANTI).tolist()
    label_rows = head_keys[:, :k].tolist()
    pairs = list(zip((first + 1).tolist(), (second + 1).tolist()))
    out = []
    for seqs_g, tr, ar, lr in zip(groups.values(), true_rows, anti_rows, label_rows):
        items = tuple((i, lab) for i, lab in enumerate(lr, 1) if lab != WILDCARD)
        core = Pattern(k, frozenset(compress(pairs, tr)), frozenset(compress(pairs, ar)), items)
        out.append(MatchingOrder(seqs_g[0], core, tuple(seqs_g)))
    return out


# ---------------------------------------------------------------------------
# plan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NonCoreVertex:
    vertex: int
    true_core: tuple[int, ...]
    anti_core: tuple[int, ...]
    label: int | None


@dataclass(frozen=True)
class AntiVertexCheck:
    """No data vertex may be adjacent to all images of ``neighbors`` except
    through the match itself."""

    anti_vertex: int
    neighbors: tuple[int, ...]
    label: int | None


@dataclass(frozen=True)
class ExplorationPlan:
    pattern: Pattern
    core_vertices: tuple[int, ...]
    partial_order: PartialOrder
    matching_orders: tuple[MatchingOrder, ...]
    non_core_vertices: tuple[NonCoreVertex, ...]
    anti_vertex_checks: tuple[AntiVertexCheck, ...]
    symmetry_breaking: bool = True

    @property
    def core(self) -> Pattern:
        return self.pattern.induced(self.core_vertices)[0]


def generate_plan(p: Pattern, symmetry_breaking: bool = True) -> ExplorationPlan:
    """Compile ``p``; raises :class:`PatternValidationError` on invalid input."""
    p.validate()
    po = break_symmetries(p) if symmetry_breaking else PartialOrder()
    core = min_connected_vertex_cover(p)
    orders = compute_matching_orders(p, core, po)
    core_set = set(core)
    non_core = []
    for u in p.regular_vertices:
        if u in core_set:
            continue
        non_core.append(
            NonCoreVertex(
                u,
                tuple(sorted(p.neighbors(u))),
                tuple(sorted(p.anti_neighbors(u) & core_set)),
                p.label(u),
            )
        )
    checks = tuple(
        AntiVertexCheck(a, tuple(sorted(p.anti_neighbors(a))), p.label(a))
        for a in p.anti_vertices
    )
    return ExplorationPlan(p, core, po, tuple(orders), tuple(non_core), checks, symmetry_breaking)


def explain_plan(plan: ExplorationPlan) -> str:
    """Stable text rendering used by the ``plan`` CLI command."""
    p = plan.pattern

    def fmt(xs) -> str:
        xs = [str(x) for x in xs]
        return " ".join(xs) if xs else "-"

    lines = [
        f"vertices {p.n}",
        "edges " + fmt(f"{a}-{b}" for a, b in sorted(p.true_edges)),
        "anti-edges " + fmt(f"{a}-{b}" for a, b in sorted(p.anti_edges)),
        "labels " + fmt(f"{u}:{l}" for u, l in p.label_items),
        "partial-order " + fmt(f"{a}<{b}" for a, b in plan.partial_order),
        "core " + fmt(plan.core_vertices),
    ]
    for i, mo in enumerate(plan.matching_orders, 1):
        seqs = " | ".join(fmt(s) for s in mo.sequences)
        lines.append(f"matching-order {i} sequences {seqs}")
    for nc in plan.non_core_vertices:
        lines.append(f"non-core {nc.vertex} true {fmt(nc.true_core)} anti {fmt(nc.anti_core)}")
    for chk in plan.anti_vertex_checks:
        lines.append(f"anti-vertex {chk.anti_vertex} neighbors {fmt(chk.neighbors)}")
    return "\n".join(lines)
