from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DIAMOND, CONSTRAINED, P
from patternmine.pattern import (
    EDGE_INDUCED_CAP,
    VERTEX_INDUCED_CAP,
    Pattern,
    PatternConstraintError,
    PatternError,
    PatternValidationError,
    UnsupportedSizeError,
    canonical_code,
    canonical_pattern,
    extend,
    format_pattern,
    generate_all_edge_induced,
    generate_all_vertex_induced,
    generate_chain,
    generate_clique,
    generate_special,
    generate_star,
    parse_patterns,
)
from patternmine.plan import generate_plan


def brute_code(p: Pattern):
    """Permutation-minimal description: the reference for canonical codes."""
    best = None
    for perm in itertools.permutations(range(1, p.n + 1)):
        labels = tuple(p.label(u) if p.label(u) is not None else -1 for u in perm)
        kinds = tuple(p.kind(a, b) for a, b in itertools.combinations(perm, 2))
        key = (labels, kinds)
        if best is None or key < best:
            best = key
    return best


def brute_connected_graphs(n: int) -> set:
    """Isomorphism classes of connected graphs on n vertices, by brute force."""
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    classes = set()
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        if not edges:
            continue
        p = P(edges, n=n)
        if len(p.regular_vertices) == n and p.is_valid():
            classes.add(brute_code(p))
    return classes


def brute_edge_induced(m: int) -> set:
    """Isomorphism classes of connected graphs with exactly m edges."""
    classes = set()
    n = m + 1
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    for edges in itertools.combinations(pairs, m):
        used = sorted({x for e in edges for x in e})
        ren = {u: i + 1 for i, u in enumerate(used)}
        p = P([(ren[a], ren[b]) for a, b in edges])
        if p.is_valid():
            classes.add(brute_code(p))
    return classes


# -- editing and queries -------------------------------------------------------


def test_add_edge_on_empty_pattern():
    p = Pattern().add_edge(1, 2)
    assert p.true_edges == {(1, 2)}
    assert p.n == 2


def test_diamond_endpoints_not_connected():
    assert not DIAMOND.are_connected(1, 3)
    assert DIAMOND.are_connected(2, 4)
    assert DIAMOND.get_neighbors(1) == {2, 4}


def test_anti_then_true_edge_conflicts():
    p = P([(1, 2), (2, 3), (3, 4)]).add_anti_edge(2, 4)
    with pytest.raises(PatternConstraintError):
        p.add_edge(2, 4)
    with pytest.raises(PatternConstraintError):
        p.add_edge(1, 2)
    with pytest.raises(PatternConstraintError):
        P([(1, 2)], [(2, 1)])


def test_remove_edge_defers_validation_to_plan_time():
    p = generate_chain(4).remove_edge(2, 3)
    assert p.true_edges == {(1, 2), (3, 4)}
    with pytest.raises(PatternValidationError):
        generate_plan(p)


def test_add_vertex_ids_must_be_contiguous():
    with pytest.raises(PatternError):
        generate_chain(2).add_edge(1, 5)


def test_labels_and_anti_vertices():
    p = CONSTRAINED["p_e"].add_label(2, 7)
    assert p.get_label(2) == 7 and p.label(1) is None
    assert p.anti_vertices == (4,)
    assert p.regular_vertices == (1, 2, 3)
    assert CONSTRAINED["p_f"].anti_vertices == (4, 5)


def test_validation_rejects_bad_shapes():
    with pytest.raises(PatternValidationError):
        Pattern().validate()
    with pytest.raises(PatternValidationError):
        P([(1, 2), (3, 4)]).validate()
    with pytest.raises(PatternValidationError):
        P([(1, 2)], [(3, 4)]).validate()
    with pytest.raises(PatternValidationError):
        P([(1, 2)], n=3).validate()


# -- generators ----------------------------------------------------------------


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_edge_induced_generation_matches_brute_force(m):
    got = generate_all_edge_induced(m)
    assert {brute_code(p) for p in got} == brute_edge_induced(m)
    assert len(got) == len(brute_edge_induced(m))


def test_edge_induced_small_counts():
    # sizes 1-4 are checked against brute force above; the rest are frozen
    # from the generator and agree with the known counts of connected graphs
    # by edge number
    assert [len(generate_all_edge_induced(m)) for m in range(1, 7)] == [1, 1, 3, 5, 12, 30]


def test_edge_induced_size_three_shapes():
    codes = {p.canonical_code() for p in generate_all_edge_induced(3)}
    assert codes == {canonical_code(q) for q in (generate_clique(3), generate_chain(4), generate_star(4))}


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_vertex_induced_generation_matches_brute_force(n):
    got = generate_all_vertex_induced(n)
    assert {brute_code(p) for p in got} == brute_connected_graphs(n)


def test_vertex_induced_counts():
    assert [len(generate_all_vertex_induced(k)) for k in range(2, 7)] == [1, 2, 6, 21, 112]


def test_generator_caps():
    with pytest.raises(UnsupportedSizeError):
        generate_all_edge_induced(EDGE_INDUCED_CAP + 1)
    with pytest.raises(UnsupportedSizeError):
        generate_all_vertex_induced(VERTEX_INDUCED_CAP + 1)
    with pytest.raises(UnsupportedSizeError):
        generate_all_edge_induced(0)


def test_special_patterns():
    assert generate_special("clique", 3) == generate_clique(3)
    assert generate_special("star", 3).true_edges == {(1, 2), (1, 3)}
    assert canonical_code(generate_star(3)) == canonical_code(generate_chain(3))
    assert generate_special("chain", 4).true_edges == {(1, 2), (2, 3), (3, 4)}
    with pytest.raises(PatternError):
        generate_special("clique", 1)
    with pytest.raises(PatternError):
        generate_special("wheel", 4)


def test_extend_examples():
    edge = generate_chain(2)
    assert [canonical_code(p) for p in extend([edge], "by_edge")] == [canonical_code(generate_chain(3))]
    grown = {canonical_code(p) for p in extend([generate_chain(3)], "by_edge")}
    assert grown == {canonical_code(q) for q in (generate_clique(3), generate_chain(4), generate_star(4))}
    tailed = extend([generate_clique(3)], "by_vertex")
    assert len(tailed) == 1 and tailed[0].num_edges == 4 and tailed[0].n == 4
    with pytest.raises(PatternError):
        extend([], "by_edge")


def test_extend_respects_labels():
    labeled = generate_chain(2).with_labels({1: 0, 2: 1})
    out = extend([labeled], "by_edge")
    # the new vertex hangs off the 0-labeled or the 1-labeled end
    assert len(out) == 2
    assert all(len(p.label_items) == 2 for p in out)


def test_extend_output_has_unique_codes():
    level = generate_all_edge_induced(3)
    out = extend(level, "by_edge")
    codes = [canonical_code(p) for p in out]
    assert len(codes) == len(set(codes))


# -- vertex-induced conversion -------------------------------------------------


def test_vertex_induced_equivalent_examples():
    tri = generate_clique(3)
    assert tri.to_vertex_induced_equivalent() == tri
    path = generate_chain(3)
    assert path.to_vertex_induced_equivalent().anti_edges == {(1, 3)}
    c4 = P([(1, 2), (2, 3), (3, 4), (1, 4)])
    assert c4.to_vertex_induced_equivalent().anti_edges == {(1, 3), (2, 4)}


def test_vertex_induced_equivalent_idempotent():
    for p in generate_all_vertex_induced(4) + list(CONSTRAINED.values()):
        q = p.to_vertex_induced_equivalent()
        assert q.to_vertex_induced_equivalent() == q
        assert q.true_edges == p.true_edges
        assert p.anti_edges <= q.anti_edges


# -- canonical codes -------------------------------------------------------------


def test_canonical_code_examples():
    tri = generate_clique(3)
    assert canonical_code(tri) == canonical_code(tri.relabel({1: 3, 2: 1, 3: 2}))
    assert canonical_code(generate_chain(4)) != canonical_code(generate_star(4))
    pe_variant = P([(1, 2), (2, 3), (1, 3)], [(1, 4), (2, 4)])
    assert canonical_code(CONSTRAINED["p_e"]) == canonical_code(pe_variant)
    # a true edge and an anti-edge are different edge kinds
    assert canonical_code(CONSTRAINED["p_a"]) != canonical_code(generate_all_vertex_induced(4)[0])


def test_canonical_code_invariant_under_all_permutations():
    patterns = generate_all_vertex_induced(4) + generate_all_vertex_induced(5)[:8] + list(CONSTRAINED.values())
    for p in patterns:
        code = canonical_code(p)
        for perm in itertools.permutations(range(1, p.n + 1)):
            assert canonical_code(p.relabel(dict(zip(range(1, p.n + 1), perm)))) == code


def test_canonical_pattern_is_a_fixed_point():
    for p in list(CONSTRAINED.values()) + generate_all_edge_induced(4):
        canon, code, perm = canonical_pattern(p)
        assert canonical_pattern(canon)[0] == canon
        assert p.relabel(perm) == canon
        assert code == canonical_code(canon)


@st.composite
def random_patterns(draw, max_n=6):
    n = draw(st.integers(2, max_n))
    kinds = draw(st.lists(st.integers(0, 2), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    labels = draw(st.lists(st.one_of(st.none(), st.integers(0, 2)), min_size=n, max_size=n))
    te, ae = [], []
    for (a, b), k in zip(itertools.combinations(range(1, n + 1), 2), kinds):
        if k == 1:
            te.append((a, b))
        elif k == 2:
            ae.append((a, b))
    lab = {u: l for u, l in enumerate(labels, 1) if l is not None}
    return P(te, ae, lab, n=n)


@settings(max_examples=150, deadline=None)
@given(random_patterns(), st.randoms(use_true_random=False))
def test_canonical_code_equality_iff_isomorphic(p, r):
    perm = list(range(1, p.n + 1))
    r.shuffle(perm)
    q = p.relabel(dict(zip(range(1, p.n + 1), perm)))
    assert canonical_code(p) == canonical_code(q)


@settings(max_examples=100, deadline=None)
@given(random_patterns(max_n=5), random_patterns(max_n=5))
def test_canonical_code_separates_non_isomorphic(p, q):
    same = p.n == q.n and brute_code(p) == brute_code(q)
    assert (canonical_code(p) == canonical_code(q)) == same


# -- text format -----------------------------------------------------------------


def test_parse_and_format_round_trip():
    pats = [DIAMOND, CONSTRAINED["p_e"].add_label(2, 5), CONSTRAINED["p_f"]]
    text = "# a comment block\n\n" + "\n\n".join(format_pattern(p) for p in pats) + "\n"
    assert parse_patterns(text) == pats


def test_parse_errors_name_the_pattern_index():
    text = "1 2\n2 3\n\n1 2\n2 x\n"
    with pytest.raises(PatternError, match="pattern 1, line 5"):
        parse_patterns(text)
    with pytest.raises(PatternError, match="pattern 0"):
        parse_patterns("1 2\n1 !2\n")
    with pytest.raises(PatternError, match="pattern 0"):
        parse_patterns("#label 1\n1 2\n")
