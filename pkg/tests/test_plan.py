from __future__ import annotations

import itertools

import pytest

from conftest import DIAMOND, CONSTRAINED, P
from patternmine.pattern import (
    PatternValidationError,
    generate_all_edge_induced,
    generate_all_vertex_induced,
    generate_chain,
    generate_clique,
    generate_star,
)
from patternmine.plan import (
    PartialOrder,
    automorphisms,
    break_symmetries,
    compute_matching_orders,
    explain_plan,
    generate_plan,
    min_connected_vertex_cover,
    orbit_partition,
)


def brute_automorphisms(p):
    out = []
    vs = list(p.vertices)
    for perm in itertools.permutations(vs):
        s = dict(zip(vs, perm))
        if all(p.kind(a, b) == p.kind(s[a], s[b]) for a, b in itertools.combinations(vs, 2)) and all(
            p.label(u) == p.label(s[u]) for u in vs
        ):
            out.append(s)
    return out


def residual_count(p, po) -> int:
    """Worst case, over all orderings of the data images, of how many
    automorphism classes satisfy the constraints. Must be exactly 1."""
    regular = p.regular_vertices
    auts = {tuple(s[u] for u in regular) for s in brute_automorphisms(p)}
    closure = po.closure()
    counts = set()
    for ranks in itertools.permutations(range(len(regular))):
        f = dict(zip(regular, ranks))
        ok = 0
        for img in auts:
            g = dict(zip(regular, (f[x] for x in img)))
            if all(g[a] < g[b] for a, b in closure):
                ok += 1
        counts.add(ok)
    return max(counts) if counts == {max(counts)} else -1


def plan_suite():
    pats = []
    for k in (2, 3, 4, 5):
        pats += generate_all_vertex_induced(k)
    pats += [p.to_vertex_induced_equivalent() for p in generate_all_vertex_induced(4)]
    pats += generate_all_edge_induced(4)
    return pats + list(CONSTRAINED.values())


# -- automorphisms -----------------------------------------------------------


def test_automorphism_counts():
    assert len(automorphisms(generate_clique(3))) == 6
    assert len(automorphisms(generate_star(4))) == 6
    pe = automorphisms(CONSTRAINED["p_e"])
    assert len(pe) == 2
    assert {1: 3, 2: 2, 3: 1, 4: 4} in pe


def test_automorphisms_match_brute_force():
    for p in plan_suite():
        got = sorted(tuple(sorted(s.items())) for s in automorphisms(p))
        want = sorted(tuple(sorted(s.items())) for s in brute_automorphisms(p))
        assert got == want, p


def test_orbits_are_unions_of_images():
    for p in plan_suite()[:40]:
        auts = brute_automorphisms(p)
        for orbit in orbit_partition(p):
            assert {s[orbit[0]] for s in auts} == set(orbit)


# -- symmetry breaking ---------------------------------------------------------


def test_break_symmetries_examples():
    assert list(break_symmetries(DIAMOND)) == [(1, 3), (2, 4)]
    assert list(break_symmetries(generate_clique(3))) == [(1, 2), (2, 3)]
    # branches of length 1, 2 and 3 off vertex 2: no symmetry at all
    asym = P([(1, 2), (2, 3), (3, 4), (4, 5), (2, 6), (6, 7)])
    assert len(brute_automorphisms(asym)) == 1
    assert list(break_symmetries(asym)) == []


def test_p_e_orders_only_the_symmetric_corners():
    po = break_symmetries(CONSTRAINED["p_e"])
    assert list(po) == [(1, 3)]


def test_residual_automorphism_is_identity():
    for p in plan_suite():
        assert residual_count(p, break_symmetries(p)) == 1, p


def test_partial_order_is_acyclic_reduction():
    for p in plan_suite():
        po = break_symmetries(p)
        closure = po.closure()
        assert all((b, a) not in closure for a, b in closure)
        # reduction: dropping any stored pair changes the closure
        pairs = list(po)
        for drop in pairs:
            rest = PartialOrder(set(pairs) - {drop})
            assert rest.closure() != closure


# -- core ------------------------------------------------------------------------


def _connected(s, p):
    s = set(s)
    start = next(iter(s))
    seen, stack = {start}, [start]
    while stack:
        u = stack.pop()
        for w in p.neighbors(u) & s:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == s


def _covers(s, p):
    anti_v = set(p.anti_vertices)
    edges = list(p.true_edges) + [e for e in p.anti_edges if not set(e) & anti_v]
    return all(a in s or b in s for a, b in edges)


def test_cover_examples():
    assert min_connected_vertex_cover(DIAMOND) == (2, 4)
    assert min_connected_vertex_cover(generate_clique(3)) == (1, 2)
    assert min_connected_vertex_cover(generate_chain(2)) == (1,)
    core_a = set(min_connected_vertex_cover(CONSTRAINED["p_a"]))
    assert core_a & {2, 4}


def test_cover_is_minimum_connected_and_first():
    for p in plan_suite():
        core = min_connected_vertex_cover(p)
        assert _covers(set(core), p) and _connected(core, p)
        smaller = [
            c
            for c in itertools.combinations(p.regular_vertices, len(core) - 1)
            if c and _covers(set(c), p) and _connected(c, p)
        ]
        assert not smaller
        same = [
            c
            for c in itertools.combinations(p.regular_vertices, len(core))
            if _covers(set(c), p) and _connected(c, p)
        ]
        assert core == min(same)


# -- matching orders ---------------------------------------------------------------


def test_matching_order_examples():
    plan = generate_plan(DIAMOND)
    assert [mo.sequence for mo in plan.matching_orders] == [(2, 4)]
    tri = generate_plan(generate_clique(3))
    assert len(tri.matching_orders) == 1
    # no constraints and symmetric roles: both sequences give the same
    # ordered core and are kept together
    free = compute_matching_orders(generate_clique(3), (1, 2), PartialOrder())
    assert len(free) == 1 and free[0].sequences == ((1, 2), (2, 1))


def test_matching_orders_respect_partial_order():
    for p in plan_suite():
        plan = generate_plan(p)
        before = plan.partial_order.restricted(plan.core_vertices)
        keys = set()
        for mo in plan.matching_orders:
            assert mo.inverse_map == {i + 1: u for i, u in enumerate(mo.sequence)}
            rc = mo.remapped_core
            key = (rc.n, rc.true_edges, rc.anti_edges, rc.label_items)
            assert key not in keys
            keys.add(key)
            for seq in mo.sequences:
                pos = {u: i for i, u in enumerate(seq)}
                assert all(pos[a] < pos[b] for a, b in before)
                assert sorted(seq) == sorted(plan.core_vertices)


# -- whole plans ---------------------------------------------------------------------


def test_plan_examples():
    plan = generate_plan(DIAMOND)
    assert plan.core_vertices == (2, 4)
    assert list(plan.partial_order) == [(1, 3), (2, 4)]
    assert len(plan.matching_orders) == 1
    edge = generate_plan(generate_chain(2))
    assert edge.core_vertices == (1,) and len(edge.matching_orders) == 1
    pe = generate_plan(CONSTRAINED["p_e"])
    assert [(c.anti_vertex, c.neighbors) for c in pe.anti_vertex_checks] == [(4, (1, 3))]
    assert set(pe.core_vertices) <= {1, 2, 3}


def test_disconnected_pattern_rejected():
    with pytest.raises(PatternValidationError):
        generate_plan(P([(1, 2), (3, 4)]))


def test_plan_without_symmetry_breaking_has_empty_order():
    plan = generate_plan(generate_star(4), symmetry_breaking=False)
    assert len(plan.partial_order) == 0
    assert plan.core_vertices == (1,)


def test_explain_plan_golden():
    text = explain_plan(generate_plan(CONSTRAINED["p_e"]))
    assert text == (
        "vertices 4\n"
        "edges 1-2 1-3 2-3\n"
        "anti-edges 1-4 3-4\n"
        "labels -\n"
        "partial-order 1<3\n"
        "core 1 2\n"
        "matching-order 1 sequences 1 2 | 2 1\n"
        "non-core 3 true 1 2 anti -\n"
        "anti-vertex 4 neighbors 1 3"
    )
