"""Plan-guided matching.

One task per data vertex. A task binds its start vertex to the highest
position of every matching order and walks the remaining core positions
through sorted adjacency lists, taking only candidates that keep the
positions in increasing id order. A finished core match is turned into one
core mapping per sequence of the matching order; the non-core vertices are
then filled in with adjacency intersections (true edges) and differences
(anti-edges). Anti-vertices are checked last.

Because the partial order admits one mapping per automorphism class and the
start vertex is always the largest core image, every match is produced by
exactly one task, once. Nothing on this path checks canonicality or
isomorphism.
"""

from __future__ import annotations

import itertools
import threading
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Callable

from .datagraph import DataGraph
from .pattern import Pattern
from .plan import ExplorationPlan, generate_plan

__all__ = [
    "Match",
    "Control",
    "WorkerContext",
    "MatcherStats",
    "match_task",
    "run_plan",
    "match_all",
    "count",
    "POLL_INTERVAL",
]

POLL_INTERVAL = 1024

HIGH_TO_LOW = "high_to_low"
LOW_TO_HIGH = "low_to_high"


@dataclass(frozen=True)
class Match:
    """A completed match.

    ``mapping`` and ``labels`` are keyed by regular pattern vertex and use
    original data-vertex ids. ``data_vertices`` holds the internal ids, index
    ``u - 1`` for pattern vertex ``u`` (``None`` for anti-vertices).
    """

    mapping: dict
    labels: dict
    data_vertices: tuple


class Control:
    """Shared stop flag. ``stop_exploration`` may be called from any callback."""

    def __init__(self, poll_interval: int = POLL_INTERVAL):
        self.poll_interval = poll_interval
        self.stopped = False

    def stop_exploration(self) -> None:
        self.stopped = True


@dataclass
class MatcherStats:
    matches: int = 0
    extensions: int = 0
    set_operations: int = 0
    tasks: int = 0
    # always zero: the matcher has no such checks; kept for side-by-side
    # reports against the brute-force explorer
    canonicality_checks: int = 0
    isomorphism_checks: int = 0
    stopped: bool = False
    # upper bound on extensions performed after the stop flag was raised
    extensions_after_stop: int = 0

    def merge(self, other: MatcherStats) -> None:
        self.matches += other.matches
        self.extensions += other.extensions
        self.set_operations += other.set_operations
        self.tasks += other.tasks
        self.canonicality_checks += other.canonicality_checks
        self.isomorphism_checks += other.isomorphism_checks
        self.stopped = self.stopped or other.stopped
        self.extensions_after_stop += other.extensions_after_stop


@dataclass
class WorkerContext:
    """Passed to callbacks alongside the match."""

    worker_id: int
    control: Control
    stats: MatcherStats = field(default_factory=MatcherStats)

    def stop(self) -> None:
        self.control.stop_exploration()


class _Stopped(Exception):
    pass


# ---------------------------------------------------------------------------
# plan compilation into per-step instructions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _CoreStep:
    pos: int
    true: tuple
    anti: tuple
    lower: int | None
    upper: int | None
    label: int | None


@dataclass(frozen=True)
class _Order:
    first: int
    first_label: int | None
    steps: tuple
    sequences: tuple


@dataclass(frozen=True)
class _FillStep:
    vertex: int
    true: tuple
    anti: tuple
    lower: tuple
    upper: tuple
    label: int | None


def _compile_order(mo, direction: str) -> _Order:
    core = mo.remapped_core
    k = core.n
    nbr = {i: core.neighbors(i) for i in range(1, k + 1)}
    anti = {i: core.anti_neighbors(i) for i in range(1, k + 1)}
    high = direction == HIGH_TO_LOW
    first = k if high else 1
    matched = [first]
    steps = []
    while len(matched) < k:
        frontier = [i for i in range(1, k + 1) if i not in matched and nbr[i] & set(matched)]
        i = max(frontier) if high else min(frontier)
        below = [j for j in matched if j < i]
        above = [j for j in matched if j > i]
        steps.append(
            _CoreStep(
                i,
                tuple(j for j in matched if j in nbr[i]),
                tuple(j for j in matched if j in anti[i]),
                max(below) if below else None,
                min(above) if above else None,
                core.label(i),
            )
        )
        matched.append(i)
    return _Order(first, core.label(first), tuple(steps), mo.sequences)


def _compile_fill(plan: ExplorationPlan) -> tuple:
    closure = plan.partial_order.closure()
    assigned = set(plan.core_vertices)
    steps = []
    for nc in plan.non_core_vertices:
        u = nc.vertex
        steps.append(
            _FillStep(
                u,
                nc.true_core,
                nc.anti_core,
                tuple(a for a, b in closure if b == u and a in assigned),
                tuple(b for a, b in closure if a == u and b in assigned),
                nc.label,
            )
        )
        assigned.add(u)
    return tuple(steps)


def _compile_checks(plan: ExplorationPlan) -> tuple:
    p = plan.pattern
    return tuple(
        (tuple((u, tuple(sorted(p.neighbors(u)))) for u in chk.neighbors), chk.label)
        for chk in plan.anti_vertex_checks
    )


class _Compiled:
    def __init__(self, plan: ExplorationPlan, direction: str = HIGH_TO_LOW):
        if direction not in (HIGH_TO_LOW, LOW_TO_HIGH):
            raise ValueError(f"unknown direction {direction!r}")
        self.plan = plan
        self.orders = tuple(_compile_order(mo, direction) for mo in plan.matching_orders)
        self.fill = _compile_fill(plan)
        self.checks = _compile_checks(plan)
        self.regular = plan.pattern.regular_vertices
        self.n = plan.pattern.n
        self.has_labels = bool(plan.pattern.label_items)


# ---------------------------------------------------------------------------
# worker
# ---------------------------------------------------------------------------


class _Worker:
    def __init__(self, compiled: _Compiled, graph: DataGraph, callback, ctx: WorkerContext):
        self.c = compiled
        self.g = graph
        self.adj = graph.adj
        self.sets = graph.adj_sets
        self.glabels = graph.labels
        self.callback = callback
        self.ctx = ctx
        self.stats = ctx.stats
        self.control = ctx.control
        self.interval = ctx.control.poll_interval
        self.next_poll = self.interval
        self.clean_poll = 0
        self.m = [None] * (compiled.n + 1)
        self.used: set[int] = set()
        self.count_only = callback is None and not compiled.checks

    # -- bookkeeping ------------------------------------------------------

    def _poll(self) -> None:
        st = self.stats
        if st.extensions >= self.next_poll:
            self.next_poll = st.extensions + self.interval
            if self.control.stopped:
                raise _Stopped
            self.clean_poll = st.extensions

    def _candidates(self, true_vs, anti_vs, lo, hi, label, exclude=None) -> list[int]:
        self.stats.set_operations += 1
        adj, sets = self.adj, self.sets
        base_v = min(true_vs, key=lambda v: len(adj[v]))
        base = adj[base_v]
        i = 0 if lo is None else bisect_right(base, lo)
        j = len(base) if hi is None else bisect_left(base, hi)
        others = [sets[v] for v in true_vs if v != base_v]
        antis = [sets[v] for v in anti_vs]
        labels = self.glabels
        out = []
        for x in base[i:j]:
            if exclude is not None and x in exclude:
                continue
            if label is not None and labels[x] != label:
                continue
            ok = True
            for s in others:
                if x not in s:
                    ok = False
                    break
            if ok:
                for s in antis:
                    if x in s:
                        ok = False
                        break
            if ok:
                out.append(x)
        return out

    # -- task -------------------------------------------------------------

    def run_task(self, start: int) -> None:
        self.stats.tasks += 1
        glabels = self.glabels
        for order in self.c.orders:
            if order.first_label is not None and glabels[start] != order.first_label:
                continue
            w = [None] * (len(order.steps) + 2)
            w[order.first] = start
            self._core(order, w, 0)

    def _core(self, order: _Order, w: list, idx: int) -> None:
        steps = order.steps
        if idx == len(steps):
            m, used = self.m, self.used
            for seq in order.sequences:
                for i, u in enumerate(seq, 1):
                    m[u] = w[i]
                used.clear()
                used.update(w[1:])
                self._fill(0)
            return
        st = steps[idx]
        lo = None if st.lower is None else w[st.lower]
        hi = None if st.upper is None else w[st.upper]
        cands = self._candidates(
            [w[j] for j in st.true], [w[j] for j in st.anti], lo, hi, st.label
        )
        stats = self.stats
        for x in cands:
            stats.extensions += 1
            if stats.extensions >= self.next_poll:
                self._poll()
            w[st.pos] = x
            self._core(order, w, idx + 1)
        w[st.pos] = None

    def _fill(self, idx: int) -> None:
        fill = self.c.fill
        m = self.m
        if idx == len(fill):
            if self._anti_vertices_ok():
                self._emit()
            return
        st = fill[idx]
        lo = max((m[a] for a in st.lower), default=None)
        hi = min((m[b] for b in st.upper), default=None)
        if lo is not None and hi is not None and lo >= hi:
            return
        cands = self._candidates(
            [m[t] for t in st.true], [m[a] for a in st.anti], lo, hi, st.label, self.used
        )
        stats = self.stats
        if self.count_only and idx == len(fill) - 1:
            stats.extensions += len(cands)
            stats.matches += len(cands)
            if stats.extensions >= self.next_poll:
                self._poll()
            return
        used = self.used
        for x in cands:
            stats.extensions += 1
            if stats.extensions >= self.next_poll:
                self._poll()
            m[st.vertex] = x
            used.add(x)
            self._fill(idx + 1)
            used.discard(x)
        m[st.vertex] = None

    def _anti_vertices_ok(self) -> bool:
        m, sets, labels = self.m, self.sets, self.glabels
        for members, label in self.c.checks:
            self.stats.set_operations += 1
            common = None
            excluded = set()
            for u, nbrs in members:
                s = sets[m[u]]
                common = set(s) if common is None else common & s
                excluded.update(m[x] for x in nbrs)
            common -= excluded
            if label is not None:
                common = {x for x in common if labels[x] == label}
            if common:
                return False
        return True

    def _emit(self) -> None:
        st = self.stats
        st.matches += 1
        cb = self.callback
        if cb is None:
            return
        m = self.m
        orig = self.g.original_ids
        labels = self.glabels
        regular = self.c.regular
        data = tuple(m[1:])
        match = Match(
            {u: orig[m[u]] for u in regular},
            {u: (None if labels is None else labels[m[u]]) for u in regular},
            data,
        )
        cb(match, self.ctx)


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------


def _labels_unmatchable(plan: ExplorationPlan, graph: DataGraph) -> bool:
    return bool(plan.pattern.label_items) and graph.labels is None


def match_task(
    start_vertex: int,
    plan: ExplorationPlan,
    graph: DataGraph,
    callback: Callable | None = None,
    control: Control | None = None,
    direction: str = HIGH_TO_LOW,
) -> MatcherStats:
    """Run the single task rooted at internal vertex ``start_vertex``."""
    ctx = WorkerContext(0, control or Control())
    if _labels_unmatchable(plan, graph):
        return ctx.stats
    worker = _Worker(_Compiled(plan, direction), graph, callback, ctx)
    try:
        worker.run_task(start_vertex)
    except _Stopped:
        ctx.stats.stopped = True
    return ctx.stats


def run_plan(
    plan: ExplorationPlan,
    graph: DataGraph,
    callback: Callable | None = None,
    threads: int = 1,
    control: Control | None = None,
    direction: str = HIGH_TO_LOW,
) -> MatcherStats:
    """Run every task of ``plan`` on ``graph`` with a pool of ``threads`` workers.

    Tasks are handed out highest degree first through a shared cursor.
    ``callback(match, ctx)`` is called once per match and may run on any
    worker thread. Returns the merged worker statistics.
    """
    control = control or Control()
    total = MatcherStats()
    if _labels_unmatchable(plan, graph):
        return total
    compiled = _Compiled(plan, direction)
    n = graph.vertex_count
    tasks = range(n - 1, -1, -1)
    cursor = itertools.count()
    lock = threading.Lock()
    errors: list[BaseException] = []
    contexts = [WorkerContext(i, control) for i in range(max(1, threads))]

    def work(ctx: WorkerContext) -> None:
        worker = _Worker(compiled, graph, callback, ctx)
        try:
            while not control.stopped:
                with lock:
                    i = next(cursor)
                if i >= n:
                    break
                worker.run_task(tasks[i])
        except _Stopped:
            pass
        except BaseException as exc:  # surfaced in the calling thread
            errors.append(exc)
            control.stop_exploration()
        if control.stopped:
            ctx.stats.stopped = True
            ctx.stats.extensions_after_stop = ctx.stats.extensions - worker.clean_poll

    if len(contexts) == 1:
        work(contexts[0])
    else:
        pool = [threading.Thread(target=work, args=(c,), daemon=True) for c in contexts]
        for t in pool:
            t.start()
        for t in pool:
            t.join()
    if errors:
        raise errors[0]
    for c in contexts:
        total.merge(c.stats)
    return total


def _normalize_mode(mode: str) -> str:
    if mode in ("edge", "edge_induced"):
        return "edge"
    if mode in ("vertex", "vertex_induced"):
        return "vertex"
    raise ValueError(f"unknown matching mode {mode!r}")


def prepare(pattern: Pattern, mode: str = "edge", symmetry_breaking: bool = True) -> ExplorationPlan:
    """Plan for ``pattern`` under ``mode`` (vertex mode adds the anti-edges)."""
    if _normalize_mode(mode) == "vertex":
        pattern = pattern.to_vertex_induced_equivalent()
    return generate_plan(pattern, symmetry_breaking)


def match_all(
    pattern: Pattern,
    graph: DataGraph,
    callback: Callable | None = None,
    mode: str = "edge",
    threads: int = 1,
    symmetry_breaking: bool = True,
    control: Control | None = None,
    direction: str = HIGH_TO_LOW,
) -> MatcherStats:
    """Find every match of ``pattern`` in ``graph``.

    ``mode`` is ``"edge"`` (edge-induced) or ``"vertex"`` (vertex-induced).
    With ``symmetry_breaking=False`` every automorphic variant of a match is
    reported separately.
    """
    plan = prepare(pattern, mode, symmetry_breaking)
    return run_plan(plan, graph, callback, threads, control, direction)


def count(
    pattern: Pattern,
    graph: DataGraph,
    mode: str = "edge",
    threads: int = 1,
    symmetry_breaking: bool = True,
) -> int:
    """Number of matches of ``pattern``."""
    return match_all(pattern, graph, None, mode, threads, symmetry_breaking).matches
