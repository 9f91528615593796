from __future__ import annotations

import importlib.util
import random
import threading
import time

import pytest

from conftest import gnp
from patternmine.aggregation import (
    Aggregator,
    AggregatorSlot,
    DomainMap,
    copy_domain_table,
    domain_insert,
    format_support_table,
    frequency_check,
    merge_domain_tables,
    mni_support,
)
from patternmine.datagraph import DataGraph
from patternmine.matcher import match_all
from patternmine.pattern import generate_chain
from patternmine.plan import orbit_partition

HAVE_ROARING = importlib.util.find_spec("pyroaring") is not None


def test_single_match_sets_one_bit_per_vertex():
    dm = DomainMap(2)
    domain_insert(dm, {1: 3, 2: 7})
    assert dm.domain(1) == {3} and dm.domain(2) == {7}


def test_set_semantics():
    dm = DomainMap(2)
    domain_insert(dm, {1: 3, 2: 7})
    domain_insert(dm, {1: 3, 2: 8})
    assert dm.popcount(1) == 1 and dm.popcount(2) == 2


def test_empty_support_is_zero():
    assert mni_support(DomainMap(3)) == 0
    assert DomainMap(0).support() == 0


def _edge_domains(g: DataGraph, merge_orbits: bool) -> DomainMap:
    p = generate_chain(2)
    orbits = orbit_partition(p) if merge_orbits else None
    dm = DomainMap(2, orbits)
    match_all(p, g, lambda m, ctx: domain_insert(dm, m))
    return dm


def test_edge_support_on_k3():
    k3 = DataGraph.from_edges([(0, 1), (1, 2), (0, 2)])
    dm = _edge_domains(k3, merge_orbits=True)
    assert mni_support(dm) == 3
    # one match per edge: without the orbit merge each side sees only 2
    assert mni_support(_edge_domains(k3, merge_orbits=False)) == 2


def test_edge_support_on_path():
    path = DataGraph.from_edges([(0, 1), (1, 2)])
    assert mni_support(_edge_domains(path, merge_orbits=True)) == 3


def test_labeled_edge_support():
    g = DataGraph.from_edges([(0, 1), (0, 2)], {0: 0, 1: 1, 2: 1})
    p = generate_chain(2).with_labels({1: 0, 2: 1})
    dm = DomainMap(2, orbit_partition(p))
    match_all(p, g, lambda m, ctx: domain_insert(dm, m))
    assert mni_support(dm) == 1
    assert dm.popcount(1) == 1 and dm.popcount(2) == 2


def test_merge_copy_and_equality():
    a, b = DomainMap(2), DomainMap(2)
    a.insert({1: 1, 2: 2})
    b.insert({1: 5, 2: 2})
    c = a.copy().merge(b)
    assert c.domain(1) == {1, 5} and a.domain(1) == {1}
    assert c == DomainMap(2).merge(b).merge(a)
    with pytest.raises(ValueError):
        a.merge(DomainMap(3))


@pytest.mark.skipif(not HAVE_ROARING, reason="pyroaring not installed")
def test_compressed_matches_dense():
    rng = random.Random(2)
    dense, comp = DomainMap(3), DomainMap(3, compressed=True)
    for _ in range(500):
        m = {u: rng.randrange(10_000) for u in (1, 2, 3)}
        dense.insert(m)
        comp.insert(m)
    assert [dense.popcount(u) for u in (1, 2, 3)] == [comp.popcount(u) for u in (1, 2, 3)]
    assert dense == comp
    assert dense.copy().merge(comp) == dense
    assert comp.copy().merge(dense) == comp


def test_sum_of_three_workers():
    agg = Aggregator(3, int, lambda a, b: a + b, epoch=0.005)
    with agg:
        for slot, v in zip(agg.slots, (3, 5, 7)):
            slot.local = v
            slot.publish()
    assert agg.value == 15


def test_zero_workers_give_identity():
    agg = Aggregator(0, int, lambda a, b: a + b)
    with agg:
        pass
    assert agg.value == 0


def test_republishing_is_idempotent():
    # snapshots are cumulative, so a value read twice or overwritten before
    # being read is never double counted
    agg = Aggregator(1, int, lambda a, b: a + b, epoch=0.001)
    seen = []
    agg.on_update = seen.append
    with agg:
        slot = agg.slots[0]
        for i in range(1, 200):
            slot.local = i
            slot.publish()
        time.sleep(0.01)
    assert agg.value == 199
    assert all(x <= 199 for x in seen)
    assert seen == sorted(seen)


def test_workers_never_block_on_the_aggregator():
    # a very slow epoch: publishing must still return immediately
    agg = Aggregator(2, int, lambda a, b: a + b, epoch=10.0)
    agg.start()
    t0 = time.perf_counter()
    for _ in range(10_000):
        agg.slots[0].local += 1
        agg.slots[0].tick()
    assert time.perf_counter() - t0 < 1.0
    assert agg.finish() == 10_000


def test_slot_consume_clears_flag():
    s = AggregatorSlot(0, lambda x: x, publish_every=2)
    assert s.consume() is None
    s.local = 4
    s.tick()
    assert not s.ready
    s.tick()
    assert s.ready and s.consume() == 4 and not s.ready


def test_mid_run_values_are_lower_bounds():
    agg = Aggregator(4, int, lambda a, b: a + b, epoch=0.001, publish_every=7)
    views = []
    agg.on_update = views.append

    def work(slot):
        for _ in range(3000):
            slot.local += 1
            slot.tick()

    with agg:
        threads = [threading.Thread(target=work, args=(s,)) for s in agg.slots]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
    assert agg.value == 12_000
    assert all(v <= 12_000 for v in views)


def test_domain_slots_equal_serial_union():
    rng = random.Random(5)
    g = gnp(40, 0.2, rng)
    p = generate_chain(3)
    orbits = orbit_partition(p)
    serial = DomainMap(3, orbits)
    match_all(p, g, lambda m, ctx: domain_insert(serial, m))
    agg = Aggregator(
        4,
        lambda: DomainMap(3, orbits),
        lambda a, b: a.copy().merge(b),
        DomainMap.copy,
        epoch=0.001,
        publish_every=5,
    )

    def cb(m, ctx):
        slot = agg.slots[ctx.worker_id]
        domain_insert(slot.local, m)
        slot.tick()

    with agg:
        match_all(p, g, cb, threads=4)
    assert agg.value == serial
    assert agg.value.support() == serial.support()


def test_domain_tables_merge():
    a = {b"x": DomainMap(2), b"y": DomainMap(2)}
    a[b"x"].insert({1: 1, 2: 2})
    b = {b"x": DomainMap(2)}
    b[b"x"].insert({1: 3, 2: 2})
    m = merge_domain_tables(a, b)
    assert m[b"x"].domain(1) == {1, 3} and a[b"x"].domain(1) == {1}
    assert set(copy_domain_table(m)) == {b"x", b"y"}


def test_frequency_check():
    assert frequency_check({"pA": 5, "pB": 2}, 3) == {"pA"}
    assert frequency_check({"pA": 5, "pB": 2}, 0) == {"pA", "pB"}
    dm = DomainMap(2)
    dm.insert({1: 1, 2: 2})
    assert frequency_check({"d": dm}, 1) == {"d"}
    assert frequency_check({"d": dm}, 2) == set()


def test_support_table_format():
    text = format_support_table({b"2:1,2,1": 4, b"2:0,0,1": 7})
    assert text == "2:0,0,1\t7\n2:1,2,1\t4\n"
    assert format_support_table({}) == ""
