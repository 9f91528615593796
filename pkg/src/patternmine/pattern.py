"""Query patterns: construction, generation, extension and canonical codes.

A :class:`Pattern` is a small undirected graph over vertices ``1..n`` with two
edge kinds. True edges must be present in a match, anti-edges must be absent.
A vertex touched only by anti-edges is an *anti-vertex*: it is never mapped to a
data vertex, it constrains the common neighbourhood of its neighbours instead.

Patterns are immutable. The editing methods (:meth:`Pattern.add_edge` and
friends) return new patterns, so a pattern can be shared freely between
threads once built.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator

__all__ = [
    "Pattern",
    "PatternError",
    "PatternConstraintError",
    "PatternValidationError",
    "UnsupportedSizeError",
    "EDGE_INDUCED_CAP",
    "VERTEX_INDUCED_CAP",
    "generate_all_edge_induced",
    "generate_all_vertex_induced",
    "generate_clique",
    "generate_star",
    "generate_chain",
    "generate_special",
    "extend",
    "extend_by_edge",
    "extend_by_vertex",
    "canonical_code",
    "canonical_form",
    "parse_patterns",
    "load_patterns",
    "format_pattern",
]

EDGE_INDUCED_CAP = 8
VERTEX_INDUCED_CAP = 6

NONE, TRUE, ANTI = 0, 1, 2
WILDCARD = -1


class PatternError(ValueError):
    """Base class for pattern errors."""


class PatternConstraintError(PatternError):
    """An edit would make an edge both true and anti, or duplicate an edge."""


class PatternValidationError(PatternError):
    """The pattern violates a structural invariant (checked at plan time)."""


class UnsupportedSizeError(PatternError):
    """A generator was asked for a size outside its supported range."""


def _pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Pattern:
    """Immutable query pattern.

    Parameters
    ----------
    n : int
        Number of vertices; vertex ids are ``1..n``.
    true_edges, anti_edges : frozenset of (int, int)
        Unordered pairs stored as ``(min, max)``.
    label_items : tuple of (vertex, label)
        Sorted ``(u, label)`` pairs. Vertices without an entry are wildcards.
    """

    n: int = 0
    true_edges: frozenset = field(default_factory=frozenset)
    anti_edges: frozenset = field(default_factory=frozenset)
    label_items: tuple = ()

    # -- construction ---------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[int, int]] = (),
        anti_edges: Iterable[tuple[int, int]] = (),
        labels: dict[int, int] | None = None,
        n: int | None = None,
    ) -> Pattern:
        """Build a pattern in one go; raises on conflicts and bad ids."""
        te, ae = set(), set()
        for kind_set, source in ((te, edges), (ae, anti_edges)):
            for u, v in source:
                if u == v:
                    raise PatternConstraintError(f"self-loop on vertex {u}")
                e = _pair(int(u), int(v))
                if e in te or e in ae:
                    raise PatternConstraintError(f"duplicate or conflicting edge {e}")
                kind_set.add(e)
        ids = {x for e in te | ae for x in e}
        if labels:
            ids |= set(labels)
        top = max(ids, default=0)
        if n is None:
            n = top
        if top > n or min(ids, default=1) < 1:
            raise PatternError(f"vertex ids must lie in 1..{n}")
        items = tuple(sorted((int(u), int(l)) for u, l in (labels or {}).items()))
        for _, l in items:
            if l < 0:
                raise PatternError("labels must be non-negative integers")
        return cls(n, frozenset(te), frozenset(ae), items)

    # -- queries ---------------------------------------------------------

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @property
    def labels(self) -> dict[int, int]:
        return dict(self.label_items)

    def label(self, u: int) -> int | None:
        """Label of ``u`` or ``None`` for a wildcard."""
        for x, l in self.label_items:
            if x == u:
                return l
        return None

    get_label = label

    def neighbors(self, u: int) -> set[int]:
        """True-edge neighbours of ``u``."""
        return {b if a == u else a for a, b in self.true_edges if u in (a, b)}

    get_neighbors = neighbors

    def anti_neighbors(self, u: int) -> set[int]:
        return {b if a == u else a for a, b in self.anti_edges if u in (a, b)}

    def are_connected(self, u: int, v: int) -> bool:
        """True when ``(u, v)`` is a true edge."""
        return _pair(u, v) in self.true_edges

    def are_anti_adjacent(self, u: int, v: int) -> bool:
        return _pair(u, v) in self.anti_edges

    def kind(self, u: int, v: int) -> int:
        e = _pair(u, v)
        if e in self.true_edges:
            return TRUE
        if e in self.anti_edges:
            return ANTI
        return NONE

    @property
    def regular_vertices(self) -> tuple[int, ...]:
        touched = {x for e in self.true_edges for x in e}
        return tuple(u for u in self.vertices if u in touched)

    @property
    def anti_vertices(self) -> tuple[int, ...]:
        touched = {x for e in self.true_edges for x in e}
        anti = {x for e in self.anti_edges for x in e}
        return tuple(u for u in self.vertices if u in anti and u not in touched)

    @property
    def num_edges(self) -> int:
        return len(self.true_edges)

    # -- editing ----------------------------------------------------------

    def _grow(self, *ids: int) -> int:
        for x in ids:
            if x < 1:
                raise PatternError(f"vertex id {x} must be positive")
        new_n = max(self.n, *ids)
        if new_n > self.n + 2 or (new_n == self.n + 2 and min(ids) != self.n + 1):
            raise PatternError(
                f"vertex ids must exist or extend the pattern contiguously (n={self.n})"
            )
        return new_n

    def add_edge(self, u: int, v: int) -> Pattern:
        return self._add(u, v, anti=False)

    def add_anti_edge(self, u: int, v: int) -> Pattern:
        return self._add(u, v, anti=True)

    def _add(self, u: int, v: int, anti: bool) -> Pattern:
        if u == v:
            raise PatternConstraintError(f"self-loop on vertex {u}")
        e = _pair(u, v)
        if e in self.true_edges or e in self.anti_edges:
            raise PatternConstraintError(f"edge {e} already present")
        n = self._grow(u, v)
        if anti:
            return Pattern(n, self.true_edges, self.anti_edges | {e}, self.label_items)
        return Pattern(n, self.true_edges | {e}, self.anti_edges, self.label_items)

    def remove_edge(self, u: int, v: int) -> Pattern:
        """Remove the true or anti edge between ``u`` and ``v``.

        Connectivity is not re-checked here; a disconnected result fails
        when a plan is generated for it.
        """
        e = _pair(u, v)
        if e in self.true_edges:
            return Pattern(self.n, self.true_edges - {e}, self.anti_edges, self.label_items)
        if e in self.anti_edges:
            return Pattern(self.n, self.true_edges, self.anti_edges - {e}, self.label_items)
        raise PatternError(f"no edge {e}")

    def add_label(self, u: int, label: int) -> Pattern:
        if not 1 <= u <= self.n:
            raise PatternError(f"unknown vertex {u}")
        if label < 0:
            raise PatternError("labels must be non-negative integers")
        items = dict(self.label_items)
        items[u] = int(label)
        return Pattern(self.n, self.true_edges, self.anti_edges, tuple(sorted(items.items())))

    def with_labels(self, labels: dict[int, int] | None) -> Pattern:
        items = tuple(sorted((labels or {}).items()))
        return Pattern(self.n, self.true_edges, self.anti_edges, items)

    def relabel(self, perm: dict[int, int]) -> Pattern:
        """Rename vertex ``u`` to ``perm[u]`` (``perm`` must be a bijection on 1..n)."""
        te = frozenset(_pair(perm[a], perm[b]) for a, b in self.true_edges)
        ae = frozenset(_pair(perm[a], perm[b]) for a, b in self.anti_edges)
        items = tuple(sorted((perm[u], l) for u, l in self.label_items))
        return Pattern(self.n, te, ae, items)

    def induced(self, vertices: Iterable[int]) -> tuple[Pattern, tuple[int, ...]]:
        """Subpattern induced by ``vertices``, renumbered ``1..k`` in sorted order.

        Returns the subpattern and the tuple of original ids (index ``i``
        holds the original id of new vertex ``i + 1``).
        """
        keep = tuple(sorted(set(vertices)))
        pos = {u: i + 1 for i, u in enumerate(keep)}
        te = frozenset(_pair(pos[a], pos[b]) for a, b in self.true_edges if a in pos and b in pos)
        ae = frozenset(_pair(pos[a], pos[b]) for a, b in self.anti_edges if a in pos and b in pos)
        items = tuple(sorted((pos[u], l) for u, l in self.label_items if u in pos))
        return Pattern(len(keep), te, ae, items), keep

    # -- validation ----------------------------------------------------------

    def validate(self) -> Pattern:
        """Check the structural invariants; returns ``self`` for chaining."""
        if not self.true_edges:
            raise PatternValidationError("pattern needs at least one true edge")
        if self.true_edges & self.anti_edges:
            raise PatternValidationError("an edge is both true and anti")
        for a, b in self.true_edges | self.anti_edges:
            if a == b or not (1 <= a <= self.n and 1 <= b <= self.n):
                raise PatternValidationError(f"bad edge {(a, b)}")
        regular = set(self.regular_vertices)
        anti = set(self.anti_vertices)
        lonely = set(self.vertices) - regular - anti
        if lonely:
            raise PatternValidationError(f"isolated vertices {sorted(lonely)}")
        for a, b in self.anti_edges:
            if a in anti and b in anti:
                raise PatternValidationError(f"anti-edge {(a, b)} joins two anti-vertices")
        if not _connected(regular, self.true_edges):
            raise PatternValidationError("regular vertices are not connected by true edges")
        return self

    def is_valid(self) -> bool:
        try:
            self.validate()
        except PatternValidationError:
            return False
        return True

    # -- transformations -----------------------------------------------------

    def to_vertex_induced_equivalent(self) -> Pattern:
        """Add an anti-edge between every non-adjacent pair of regular vertices.

        Edge-induced matches of the result are exactly the vertex-induced
        matches of ``self``. Existing anti-edges are kept.
        """
        regular = self.regular_vertices
        extra = {
            (a, b)
            for a, b in itertools.combinations(regular, 2)
            if (a, b) not in self.true_edges
        }
        return Pattern(self.n, self.true_edges, self.anti_edges | extra, self.label_items)

    def canonical_code(self) -> bytes:
        return canonical_code(self)

    def __repr__(self) -> str:
        return f"Pattern({format_pattern(self, sep='; ')})"


def _connected(vertices: set[int], edges: Iterable[tuple[int, int]]) -> bool:
    if not vertices:
        return False
    adj: dict[int, set[int]] = {u: set() for u in vertices}
    for a, b in edges:
        if a in adj and b in adj:
            adj[a].add(b)
            adj[b].add(a)
    start = next(iter(vertices))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vertices)


# ---------------------------------------------------------------------------
# canonical codes
# ---------------------------------------------------------------------------


def kind_matrix(p: Pattern) -> list[list[int]]:
    """``(n+1) x (n+1)`` matrix of edge kinds; row/column 0 unused."""
    m = [[NONE] * (p.n + 1) for _ in range(p.n + 1)]
    for a, b in p.true_edges:
        m[a][b] = m[b][a] = TRUE
    for a, b in p.anti_edges:
        m[a][b] = m[b][a] = ANTI
    return m


def label_vector(p: Pattern) -> list[int]:
    lab = [WILDCARD] * (p.n + 1)
    for u, l in p.label_items:
        lab[u] = l
    return lab


def refine_colors(n: int, kinds: list[list[int]], labels: list[int]) -> list[int]:
    """Colour refinement; colours are canonical (invariant under renaming).

    Index 0 of the returned list is unused.
    """
    sig = [None] + [
        (
            labels[u],
            sum(1 for w in range(1, n + 1) if kinds[u][w] == TRUE),
            sum(1 for w in range(1, n + 1) if kinds[u][w] == ANTI),
        )
        for u in range(1, n + 1)
    ]
    colors = _rank(sig)
    classes = len(set(colors[1:]))
    while True:
        sig = [None] + [
            (
                colors[u],
                tuple(sorted((kinds[u][w], colors[w]) for w in range(1, n + 1) if kinds[u][w])),
            )
            for u in range(1, n + 1)
        ]
        new = _rank(sig)
        new_classes = len(set(new[1:]))
        if new_classes == classes:
            return colors
        colors, classes = new, new_classes


def _rank(sig: list) -> list[int]:
    order = {s: i for i, s in enumerate(sorted(set(sig[1:])))}
    return [0] + [order[s] for s in sig[1:]]


def _twins(u: int, v: int, n: int, kinds: list[list[int]], labels: list[int]) -> bool:
    if labels[u] != labels[v]:
        return False
    ku, kv = kinds[u], kinds[v]
    return all(ku[w] == kv[w] for w in range(1, n + 1) if w != u and w != v)


def canonical_form(p: Pattern) -> tuple[bytes, dict[int, int]]:
    """Return ``(code, perm)`` where ``perm`` maps vertices to canonical positions.

    The code lists, position by position, the vertex label followed by the
    edge kinds towards all earlier positions; it is the lexicographic minimum
    over all orderings compatible with the refined colours. Isomorphic
    patterns (respecting edge kinds and labels) get equal codes.
    """
    n = p.n
    kinds = kind_matrix(p)
    labels = label_vector(p)
    colors = refine_colors(n, kinds, labels)
    best: list[int] | None = None
    best_order: list[int] | None = None
    order: list[int] = []
    code: list[int] = []
    used = [False] * (n + 1)

    def search() -> None:
        nonlocal best, best_order
        depth = len(order)
        if depth == n:
            if best is None or code < best:
                best, best_order = code[:], order[:]
            return
        free = [u for u in range(1, n + 1) if not used[u]]
        low = min(colors[u] for u in free)
        tried: list[int] = []
        for u in free:
            if colors[u] != low:
                continue
            if any(_twins(u, t, n, kinds, labels) for t in tried):
                continue
            tried.append(u)
            row = [labels[u]] + [kinds[w][u] for w in order]
            start = len(code)
            code.extend(row)
            if best is not None:
                prefix = best[:len(code)]
                if code > prefix:
                    del code[start:]
                    continue
            order.append(u)
            used[u] = True
            search()
            used[u] = False
            order.pop()
            del code[start:]

    search()
    text = f"{n}:" + ",".join(map(str, best or []))
    perm = {u: i + 1 for i, u in enumerate(best_order or [])}
    return text.encode("ascii"), perm


def canonical_code(p: Pattern) -> bytes:
    """Isomorphism-invariant byte string for ``p``."""
    return canonical_form(p)[0]


def canonical_pattern(p: Pattern) -> tuple[Pattern, bytes, dict[int, int]]:
    """The canonically renumbered copy of ``p`` with its code and permutation."""
    code, perm = canonical_form(p)
    return p.relabel(perm), code, perm


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def _dedupe(patterns: Iterable[Pattern]) -> list[Pattern]:
    seen: dict[bytes, Pattern] = {}
    for q in patterns:
        canon, code, _ = canonical_pattern(q)
        seen.setdefault(code, canon)
    return [seen[c] for c in sorted(seen)]


def generate_clique(size: int) -> Pattern:
    _check_special(size)
    return Pattern.from_edges(itertools.combinations(range(1, size + 1), 2))


def generate_star(size: int) -> Pattern:
    """Vertex 1 is the centre; ``size - 1`` leaves."""
    _check_special(size)
    return Pattern.from_edges((1, v) for v in range(2, size + 1))


def generate_chain(size: int) -> Pattern:
    _check_special(size)
    return Pattern.from_edges((v, v + 1) for v in range(1, size))


def _check_special(size: int) -> None:
    if size < 2:
        raise PatternError(f"size must be at least 2, got {size}")


_SPECIAL = {"clique": generate_clique, "star": generate_star, "chain": generate_chain}


def generate_special(kind: str, size: int) -> Pattern:
    try:
        return _SPECIAL[kind](size)
    except KeyError:
        raise PatternError(f"unknown special pattern {kind!r}") from None


def extend_by_edge(patterns: Iterable[Pattern]) -> list[Pattern]:
    """All patterns one true edge larger, unique up to isomorphism.

    The new edge either joins two existing non-adjacent vertices or hangs a
    fresh unlabeled vertex off an existing regular vertex.
    """
    out: list[Pattern] = []
    for p in patterns:
        p.validate()
        for a, b in itertools.combinations(p.vertices, 2):
            if p.kind(a, b) == NONE:
                q = p.add_edge(a, b)
                if q.is_valid():
                    out.append(q)
        for u in p.regular_vertices:
            out.append(p.add_edge(u, p.n + 1))
    return _dedupe(out)


def extend_by_vertex(patterns: Iterable[Pattern]) -> list[Pattern]:
    """All patterns with one more vertex joined by a single true edge."""
    out: list[Pattern] = []
    for p in patterns:
        p.validate()
        for u in p.regular_vertices:
            out.append(p.add_edge(u, p.n + 1))
    return _dedupe(out)


def extend(patterns: Iterable[Pattern], mode: str = "by_edge") -> list[Pattern]:
    patterns = list(patterns)
    if not patterns:
        raise PatternError("extend needs at least one pattern")
    if mode in ("by_edge", "edge"):
        return extend_by_edge(patterns)
    if mode in ("by_vertex", "vertex"):
        return extend_by_vertex(patterns)
    raise PatternError(f"unknown extension mode {mode!r}")


def generate_all_edge_induced(size: int) -> list[Pattern]:
    """Connected unlabeled patterns with exactly ``size`` edges."""
    if not 1 <= size <= EDGE_INDUCED_CAP:
        raise UnsupportedSizeError(f"edge count must be in 1..{EDGE_INDUCED_CAP}")
    level = [generate_chain(2)]
    for _ in range(size - 1):
        level = extend_by_edge(level)
    return level


def generate_all_vertex_induced(size: int) -> list[Pattern]:
    """Connected unlabeled graphs on ``size`` vertices, unique up to isomorphism."""
    if not 2 <= size <= VERTEX_INDUCED_CAP:
        raise UnsupportedSizeError(f"vertex count must be in 2..{VERTEX_INDUCED_CAP}")
    level = [generate_chain(2)]
    for k in range(3, size + 1):
        grown = []
        # every connected graph has a non-cut vertex, so adding one vertex
        # with any non-empty neighbourhood reaches all of them
        for p in level:
            for r in range(1, k):
                for nbrs in itertools.combinations(range(1, k), r):
                    q = Pattern(k, p.true_edges | {(u, k) for u in nbrs})
                    grown.append(q)
        level = _dedupe(grown)
    return level


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


def _iter_blocks(text: str) -> Iterator[list[tuple[int, str]]]:
    block: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            if block:
                yield block
                block = []
            continue
        block.append((lineno, line))
    if block:
        yield block


def parse_patterns(text: str) -> list[Pattern]:
    """Parse the pattern text format.

    One edge per line: ``u v`` for a true edge, ``u !v`` for an anti-edge,
    ``#label u l`` to label a vertex. Other ``#`` lines are comments. Blank
    lines separate patterns.
    """
    patterns: list[Pattern] = []
    for block in _iter_blocks(text):
        if all(line.startswith("#") and not line[1:].split()[:1] == ["label"] for _, line in block):
            continue
        index = len(patterns)
        edges, anti, labels = [], [], {}
        for lineno, line in block:
            try:
                if line.startswith("#"):
                    parts = line[1:].split()
                    if parts and parts[0] == "label":
                        if len(parts) != 3:
                            raise ValueError("expected '#label u l'")
                        labels[int(parts[1])] = int(parts[2])
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise ValueError("expected 'u v' or 'u !v'")
                u, v = parts
                if v.startswith("!"):
                    anti.append((int(u), int(v[1:])))
                elif u.startswith("!"):
                    anti.append((int(u[1:]), int(v)))
                else:
                    edges.append((int(u), int(v)))
            except ValueError as exc:
                raise PatternError(f"pattern {index}, line {lineno}: {exc}") from None
        try:
            patterns.append(Pattern.from_edges(edges, anti, labels))
        except PatternError as exc:
            raise PatternError(f"pattern {index}: {exc}") from None
    return patterns


def load_patterns(path) -> list[Pattern]:
    with open(path, encoding="utf-8") as fh:
        return parse_patterns(fh.read())


def format_pattern(p: Pattern, sep: str = "\n") -> str:
    """Inverse of :func:`parse_patterns` for a single pattern."""
    lines = [f"{a} {b}" for a, b in sorted(p.true_edges)]
    lines += [f"{a} !{b}" for a, b in sorted(p.anti_edges)]
    lines += [f"#label {u} {l}" for u, l in p.label_items]
    return sep.join(lines)
