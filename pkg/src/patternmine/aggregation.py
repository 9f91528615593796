"""Pattern-keyed aggregation.

``DomainMap`` holds, for every pattern vertex, the set of data vertices that
some match mapped it to. MNI support is the smallest such set. Sets are
plain Python integers used as bitmaps, or Roaring bitmaps when the optional
``pyroaring`` package is installed and compression is asked for.

``Aggregator`` merges per-worker values in a background thread while the
matcher runs. A worker never waits for it: it drops a snapshot of its
running value into its slot and raises a flag. The aggregator picks up
flagged slots every epoch, and a final drain after the run makes the result
exact.
"""

from __future__ import annotations

import threading
from typing import Callable, Generic, Iterable, Mapping, TypeVar

__all__ = [
    "DomainMap",
    "domain_insert",
    "mni_support",
    "AggregatorSlot",
    "Aggregator",
    "aggregator_loop",
    "frequency_check",
    "format_support_table",
    "merge_domain_tables",
    "copy_domain_table",
    "EPOCH_SECONDS",
]

EPOCH_SECONDS = 0.05

T = TypeVar("T")

try:  # optional compressed bitmaps
    from pyroaring import BitMap as _RoaringBitMap
except ImportError:  # pragma: no cover - depends on the environment
    _RoaringBitMap = None


def _popcount(x: int) -> int:
    return bin(x).count("1")


class DomainMap:
    """Per-pattern-vertex domains over data-vertex ids.

    Parameters
    ----------
    size : int
        Number of pattern vertices; domains are indexed ``1..size``.
    orbits : iterable of iterables, optional
        Groups of pattern vertices that are automorphic to each other. When
        matches are reported once per automorphism class, a vertex's full
        domain is the union over its orbit, and :meth:`support` uses that.
    compressed : bool
        Store Roaring bitmaps instead of dense integer bitmaps.
    """

    __slots__ = ("size", "orbits", "compressed", "_bits")

    def __init__(self, size: int, orbits: Iterable[Iterable[int]] | None = None, compressed: bool = False):
        if compressed and _RoaringBitMap is None:
            raise RuntimeError("compressed domains need the pyroaring package")
        self.size = size
        self.orbits = (
            tuple(tuple(sorted(o)) for o in orbits)
            if orbits is not None
            else tuple((u,) for u in range(1, size + 1))
        )
        self.compressed = compressed
        if compressed:
            self._bits = [_RoaringBitMap() for _ in range(size + 1)]
        else:
            self._bits = [0] * (size + 1)

    def add(self, u: int, v: int) -> None:
        if self.compressed:
            self._bits[u].add(v)
        else:
            self._bits[u] |= 1 << v

    def insert(self, vertices: Mapping[int, int] | Iterable) -> None:
        """Record one match given as ``{u: v}`` or as a sequence indexed ``u - 1``."""
        items = vertices.items() if isinstance(vertices, Mapping) else enumerate(vertices, 1)
        for u, v in items:
            if v is not None:
                self.add(u, v)

    def domain(self, u: int) -> set[int]:
        b = self._bits[u]
        if self.compressed:
            return set(b)
        out, i = set(), 0
        while b:
            if b & 1:
                out.add(i)
            b >>= 1
            i += 1
        return out

    def popcount(self, u: int) -> int:
        b = self._bits[u]
        return len(b) if self.compressed else _popcount(b)

    def orbit_popcount(self, orbit: Iterable[int]) -> int:
        orbit = list(orbit)
        if self.compressed:
            acc = _RoaringBitMap()
            for u in orbit:
                acc |= self._bits[u]
            return len(acc)
        acc = 0
        for u in orbit:
            acc |= self._bits[u]
        return _popcount(acc)

    def support(self) -> int:
        """MNI support: the smallest orbit-merged domain (0 when empty)."""
        if not self.orbits:
            return 0
        return min(self.orbit_popcount(o) for o in self.orbits)

    def merge(self, other: DomainMap) -> DomainMap:
        """OR ``other`` into this map in place and return it."""
        if other.size != self.size:
            raise ValueError("domain maps of different pattern sizes")
        for u in range(1, self.size + 1):
            b = other._bits[u]
            if self.compressed and not other.compressed:
                self._bits[u] |= _RoaringBitMap(DomainMap._indices(b))
            elif other.compressed and not self.compressed:
                for v in b:
                    self._bits[u] |= 1 << v
            else:
                self._bits[u] |= b
        return self

    @staticmethod
    def _indices(b: int):
        i = 0
        while b:
            if b & 1:
                yield i
            b >>= 1
            i += 1

    def copy(self) -> DomainMap:
        dm = DomainMap.__new__(DomainMap)
        dm.size, dm.orbits, dm.compressed = self.size, self.orbits, self.compressed
        dm._bits = [b.copy() for b in self._bits] if self.compressed else list(self._bits)
        return dm

    def __eq__(self, other) -> bool:
        if not isinstance(other, DomainMap) or other.size != self.size:
            return NotImplemented
        return all(self.domain(u) == other.domain(u) for u in range(1, self.size + 1))

    def __repr__(self) -> str:
        pops = [self.popcount(u) for u in range(1, self.size + 1)]
        return f"DomainMap(size={self.size}, popcounts={pops})"


def domain_insert(dm: DomainMap, match) -> None:
    """Set ``dm[u]`` bit ``match(u)`` for every regular pattern vertex ``u``.

    ``match`` is a :class:`~patternmine.matcher.Match` (its internal ids are
    used) or a plain ``{u: v}`` mapping.
    """
    dm.insert(getattr(match, "data_vertices", match))


def mni_support(dm: DomainMap) -> int:
    return dm.support()


def merge_domain_tables(a: dict, b: dict) -> dict:
    """Merge two ``{key: DomainMap}`` tables into a new one."""
    out = {k: v.copy() for k, v in a.items()}
    for k, v in b.items():
        if k in out:
            out[k].merge(v)
        else:
            out[k] = v.copy()
    return out


def copy_domain_table(t: dict) -> dict:
    return {k: v.copy() for k, v in t.items()}


# ---------------------------------------------------------------------------
# on-the-fly aggregation
# ---------------------------------------------------------------------------


class AggregatorSlot(Generic[T]):
    """One worker's side of the aggregator.

    The worker owns ``local`` and updates it freely. :meth:`publish` stores a
    snapshot of it and raises ``ready``; an unconsumed snapshot is simply
    replaced by the newer one. Snapshots are cumulative, so replacing one
    loses nothing.
    """

    __slots__ = ("local", "pending", "ready", "_snapshot", "_every", "_ticks")

    def __init__(self, identity: T, snapshot: Callable[[T], T], publish_every: int = 256):
        self.local = identity
        self.pending = None
        self.ready = False
        self._snapshot = snapshot
        self._every = publish_every
        self._ticks = 0

    def publish(self) -> None:
        self.pending = self._snapshot(self.local)
        self.ready = True

    def tick(self) -> None:
        """Count one local update and publish every ``publish_every`` of them."""
        self._ticks += 1
        if self._ticks >= self._every:
            self._ticks = 0
            self.publish()

    def consume(self):
        """Aggregator side: take the pending snapshot, or ``None``."""
        if not self.ready:
            return None
        # clear first: a publish racing with us leaves ready set again and at
        # worst gets read twice, which is harmless for cumulative values
        self.ready = False
        return self.pending


def _merge_all(values, identity: Callable[[], T], merge_fn: Callable[[T, T], T]) -> T:
    acc = identity()
    for v in values:
        if v is not None:
            acc = merge_fn(acc, v)
    return acc


def aggregator_loop(
    slots: list[AggregatorSlot],
    merge_fn: Callable[[T, T], T],
    identity: Callable[[], T],
    done: threading.Event,
    publish: Callable[[T], None],
    epoch: float = EPOCH_SECONDS,
) -> None:
    """Merge flagged slots every ``epoch`` seconds until ``done`` is set.

    Keeps the latest consumed snapshot per worker and hands the merge of all
    of them to ``publish`` whenever something new arrived.
    """
    latest: list = [None] * len(slots)
    while not done.wait(epoch):
        fresh = False
        for i, s in enumerate(slots):
            v = s.consume()
            if v is not None:
                latest[i] = v
                fresh = True
        if fresh:
            publish(_merge_all(latest, identity, merge_fn))


class Aggregator(Generic[T]):
    """Background merge of per-worker values.

    Parameters
    ----------
    workers : int
        Number of slots.
    identity : callable
        Returns a fresh neutral value.
    merge_fn : callable
        ``merge_fn(a, b)`` returns the merge of two values without mutating
        ``b``. Must be associative and commutative.
    snapshot : callable, optional
        Copies a local value for publishing (identity function by default,
        fine for immutable values such as ints).
    on_update : callable, optional
        Called from the aggregator thread with every new global value; may
        e.g. stop the exploration.

    Use as a context manager; :attr:`value` holds the exact global value
    after exit.
    """

    def __init__(
        self,
        workers: int,
        identity: Callable[[], T],
        merge_fn: Callable[[T, T], T],
        snapshot: Callable[[T], T] | None = None,
        on_update: Callable[[T], None] | None = None,
        epoch: float = EPOCH_SECONDS,
        publish_every: int = 256,
    ):
        self.identity = identity
        self.merge_fn = merge_fn
        self.on_update = on_update
        self.epoch = epoch
        snap = snapshot or (lambda x: x)
        self.slots = [AggregatorSlot(identity(), snap, publish_every) for _ in range(max(0, workers))]
        self._value = identity()
        self._lock = threading.Lock()
        self._done = threading.Event()
        self._thread: threading.Thread | None = None

    @property
    def value(self) -> T:
        with self._lock:
            return self._value

    def _publish(self, v: T) -> None:
        with self._lock:
            self._value = v
        if self.on_update is not None:
            self.on_update(v)

    def start(self) -> Aggregator:
        self._thread = threading.Thread(
            target=aggregator_loop,
            args=(self.slots, self.merge_fn, self.identity, self._done, self._publish, self.epoch),
            daemon=True,
        )
        self._thread.start()
        return self

    def finish(self) -> T:
        """Stop the thread and merge every worker's final local value."""
        self._done.set()
        if self._thread is not None:
            self._thread.join()
            self._thread = None
        final = _merge_all((s.local for s in self.slots), self.identity, self.merge_fn)
        self._publish(final)
        return final

    def __enter__(self) -> Aggregator:
        return self.start()

    def __exit__(self, *exc) -> None:
        self.finish()


def frequency_check(supports: Mapping, tau: int) -> set:
    """Keys whose support is at least ``tau``.

    ``supports`` maps keys to either an integer or a :class:`DomainMap`.
    """
    out = set()
    for k, s in supports.items():
        value = s.support() if isinstance(s, DomainMap) else s
        if value >= tau:
            out.add(k)
    return out


def format_support_table(supports: Mapping) -> str:
    """``code<TAB>support`` lines sorted by code."""
    rows = []
    for k in sorted(supports):
        s = supports[k]
        value = s.support() if isinstance(s, DomainMap) else s
        code = k.decode("ascii") if isinstance(k, bytes) else str(k)
        rows.append(f"{code}\t{value}")
    return "\n".join(rows) + ("\n" if rows else "")
