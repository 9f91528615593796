"""Data graph storage: degree-ordered ids, sorted adjacency, set operations.

Internal vertex ids ``0..n-1`` are assigned so that a smaller id never has a
larger degree than a bigger id. Matching orders only ever look "upwards" in
id order, so high-degree vertices see few candidates and the work spreads
more evenly across start vertices.
"""

from __future__ import annotations

import struct
from bisect import bisect_left, bisect_right
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DataGraph",
    "GraphFormatError",
    "load_edge_list",
    "load_graph",
    "reorder_by_degree",
    "ordered_set_op",
    "save_snapshot",
    "load_snapshot",
    "SNAPSHOT_MAGIC",
]

SNAPSHOT_MAGIC = b"PMGRAPH\x00"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<8sIIQQ")


class GraphFormatError(ValueError):
    """Malformed edge list, label file or snapshot."""


class DataGraph:
    """Undirected simple graph with optional integer vertex labels.

    ``adj[v]`` is the sorted neighbour list of internal vertex ``v`` and
    ``adj_sets[v]`` the same neighbours as a set for membership tests.
    ``original_ids[v]`` is the id ``v`` had in the input.
    """

    __slots__ = ("adj", "adj_sets", "labels", "original_ids", "id_map")

    def __init__(
        self,
        adj: Sequence[Sequence[int]],
        labels: Sequence[int] | None = None,
        original_ids: Sequence[int] | None = None,
    ):
        self.adj = [list(a) for a in adj]
        self.adj_sets = [frozenset(a) for a in self.adj]
        n = len(self.adj)
        self.labels = None if labels is None else [int(l) for l in labels]
        self.original_ids = list(range(n)) if original_ids is None else [int(x) for x in original_ids]
        self.id_map = {o: i for i, o in enumerate(self.original_ids)}

    # -- construction ---------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[int, int]],
        labels: dict[int, int] | None = None,
        reorder: bool = True,
    ) -> DataGraph:
        """Build from ``(u, v)`` pairs in original ids.

        Self-loops are dropped and duplicates collapsed. Vertices are the
        endpoints of the remaining edges; ``labels`` may only name those.
        """
        nbrs: dict[int, set[int]] = {}
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                continue
            nbrs.setdefault(u, set()).add(v)
            nbrs.setdefault(v, set()).add(u)
        if labels is not None:
            unknown = sorted(set(labels) - set(nbrs))
            if unknown:
                raise GraphFormatError(f"label for unknown vertex {unknown[0]}")
        originals = sorted(nbrs)
        pos = {o: i for i, o in enumerate(originals)}
        adj = [sorted(pos[w] for w in nbrs[o]) for o in originals]
        labs = None
        if labels is not None:
            missing = [o for o in originals if o not in labels]
            if missing:
                raise GraphFormatError(f"vertex {missing[0]} has no label")
            labs = [labels[o] for o in originals]
        g = cls(adj, labs, originals)
        return reorder_by_degree(g) if reorder else g

    # -- queries ----------------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return len(self.adj)

    n = vertex_count

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int) -> list[int]:
        return self.adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj_sets[u]

    def label(self, v: int) -> int | None:
        return None if self.labels is None else self.labels[v]

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None

    def edges(self):
        """Edges ``(u, v)`` with ``u < v`` in internal ids."""
        for u, nb in enumerate(self.adj):
            for v in nb[bisect_right(nb, u):]:
                yield u, v

    def internal(self, original: int) -> int:
        return self.id_map[original]

    def __repr__(self) -> str:
        lab = ", labeled" if self.labels is not None else ""
        return f"DataGraph(n={self.vertex_count}, m={self.edge_count}{lab})"


def reorder_by_degree(g: DataGraph) -> DataGraph:
    """Renumber so that ids are sorted by ``(degree, original id)``."""
    order = sorted(range(g.vertex_count), key=lambda v: (len(g.adj[v]), g.original_ids[v]))
    new_id = [0] * len(order)
    for i, v in enumerate(order):
        new_id[v] = i
    adj = [sorted(new_id[w] for w in g.adj[v]) for v in order]
    labels = None if g.labels is None else [g.labels[v] for v in order]
    return DataGraph(adj, labels, [g.original_ids[v] for v in order])


# ---------------------------------------------------------------------------
# text ingestion
# ---------------------------------------------------------------------------


def _read_pairs(path, what: str):
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise GraphFormatError(f"cannot read {what} file {path}: {exc}") from None
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) < 2:
                raise GraphFormatError(f"{path}:{lineno}: expected two integers")
            try:
                yield lineno, int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"{path}:{lineno}: non-integer token") from None


def load_edge_list(edge_path, label_path=None) -> DataGraph:
    """Read a whitespace separated edge list and an optional ``v l`` label file."""
    edges = [(u, v) for _, u, v in _read_pairs(edge_path, "edge")]
    labels = None
    if label_path is not None:
        labels = {}
        endpoints = {x for e in edges for x in e if e[0] != e[1]}
        for lineno, v, l in _read_pairs(label_path, "label"):
            if v not in endpoints:
                raise GraphFormatError(f"{label_path}:{lineno}: label for unknown vertex {v}")
            labels[v] = l
    return DataGraph.from_edges(edges, labels)


def load_graph(path, label_path=None) -> DataGraph:
    """Load a snapshot or an edge list, whichever ``path`` holds."""
    try:
        with open(path, "rb") as fh:
            head = fh.read(len(SNAPSHOT_MAGIC))
    except OSError as exc:
        raise GraphFormatError(f"cannot read graph file {path}: {exc}") from None
    if head == SNAPSHOT_MAGIC:
        if label_path is not None:
            raise GraphFormatError("snapshots carry their own labels")
        return load_snapshot(path)
    return load_edge_list(path, label_path)


# ---------------------------------------------------------------------------
# binary snapshot
# ---------------------------------------------------------------------------
#
# little-endian layout:
#   magic      8 bytes  b"PMGRAPH\0"
#   version    u32      1
#   flags      u32      bit 0: labels present
#   n          u64      vertex count
#   nnz        u64      total adjacency entries (2 |E|)
#   offsets    u64[n+1]
#   neighbors  u32[nnz] internal ids, each list ascending
#   originals  i64[n]   original id of each internal vertex
#   labels     i32[n]   only when flag bit 0 is set


def save_snapshot(g: DataGraph, path) -> None:
    n = g.vertex_count
    lengths = np.fromiter((len(a) for a in g.adj), dtype=np.uint64, count=n)
    offsets = np.zeros(n + 1, dtype="<u8")
    np.cumsum(lengths, out=offsets[1:])
    nnz = int(offsets[-1])
    flat = np.fromiter((w for a in g.adj for w in a), dtype="<u4", count=nnz)
    flags = 1 if g.labels is not None else 0
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, flags, n, nnz))
        fh.write(offsets.astype("<u8").tobytes())
        fh.write(flat.tobytes())
        fh.write(np.asarray(g.original_ids, dtype="<i8").tobytes())
        if flags & 1:
            fh.write(np.asarray(g.labels, dtype="<i4").tobytes())


def load_snapshot(path) -> DataGraph:
    try:
        data = open(path, "rb").read()
    except OSError as exc:
        raise GraphFormatError(f"cannot read snapshot {path}: {exc}") from None
    if len(data) < _HEADER.size:
        raise GraphFormatError("truncated snapshot header")
    magic, version, flags, n, nnz = _HEADER.unpack_from(data)
    if magic != SNAPSHOT_MAGIC:
        raise GraphFormatError("not a graph snapshot")
    if version != SNAPSHOT_VERSION:
        raise GraphFormatError(f"unsupported snapshot version {version}")
    expected = _HEADER.size + 8 * (n + 1) + 4 * nnz + 8 * n + (4 * n if flags & 1 else 0)
    if len(data) != expected:
        raise GraphFormatError(f"snapshot size {len(data)} != expected {expected}")
    at = _HEADER.size
    offsets = np.frombuffer(data, dtype="<u8", count=n + 1, offset=at).tolist()
    at += 8 * (n + 1)
    flat = np.frombuffer(data, dtype="<u4", count=nnz, offset=at).tolist()
    at += 4 * nnz
    originals = np.frombuffer(data, dtype="<i8", count=n, offset=at).tolist()
    at += 8 * n
    labels = None
    if flags & 1:
        labels = np.frombuffer(data, dtype="<i4", count=n, offset=at).tolist()
    adj = [flat[offsets[v]:offsets[v + 1]] for v in range(n)]
    return DataGraph(adj, labels, originals)


# ---------------------------------------------------------------------------
# ordered set operations
# ---------------------------------------------------------------------------


def ordered_set_op(
    kind: str,
    lists: Sequence[Sequence[int]],
    lower: int | None = None,
    upper: int | None = None,
) -> list[int]:
    """Multi-way intersection or left-fold difference of sorted lists.

    The result is restricted to the open range ``(lower, upper)``; either bound
    may be ``None``. Inputs must be ascending, and so is the output.
    """
    if len(lists) < 2:
        raise ValueError("ordered_set_op needs at least two lists")
    if kind == "intersect":
        base, *rest = sorted(lists, key=len)
    elif kind == "difference":
        base, *rest = lists
    else:
        raise ValueError(f"unknown set operation {kind!r}")
    lo = 0 if lower is None else bisect_right(base, lower)
    hi = len(base) if upper is None else bisect_left(base, upper)
    others = [set(r) for r in rest]
    if kind == "intersect":
        return [x for x in base[lo:hi] if all(x in o for o in others)]
    return [x for x in base[lo:hi] if not any(x in o for o in others)]

