import itertools

import pytest

from distlab import relcore as rc
from distlab.autgroup import automorphisms, brute_force_automorphisms, image, orbits, pointwise_stabilizer
from distlab.catalog import FamilySpec, make, q2
from distlab.disting import is_distinguishing
from distlab.fixtype import (
    FAIL,
    LIMITED,
    NA,
    PASS,
    Budgets,
    TypePair,
    candidate,
    check_fixing_type,
    classify_pair,
    construct_partition,
    cover_check,
    set_type_invariance_check,
    q2_chain,
    verify_trace,
)
from distlab.relcore import StructureError


@pytest.fixture(scope="module")
def rado40():
    return make(FamilySpec("rado", (), cap=40))[0]


@pytest.fixture(scope="module")
def rado60():
    return make(FamilySpec("rado", (), cap=60))[0]


def _set_orbits_brute(s, f):
    """Orbits of the setwise stabilizer of f, from all bijections."""
    elems = [p for p in brute_force_automorphisms(s) if image(p, f) == frozenset(f)]
    seen, out = set(), []
    for x in range(s.n):
        if x not in seen:
            o = {p[x] for p in elems}
            seen |= o
            out.append(o)
    return out


def test_classify_rado_neighbourhood(rado40):
    assert classify_pair(rado40, {0}, rc.neighbors(rado40, 0)) == "extended_set_type"


def test_classify_half_orbit_is_none():
    # path 0-1-2: the stabilizer of the middle swaps the ends
    assert classify_pair(rc.path(3), {1}, {0}) is None
    assert classify_pair(rc.path(3), {1}, {0, 2}) == "set_type"


def test_classify_against_brute_force_orbits():
    s = rc.cycle(6)
    for f in ({0}, {0, 1}, {0, 3}):
        for t in ({1, 5}, {2, 4}, {1, 2, 4, 5}, {3}):
            t = t - f
            if not t:
                continue
            orbs = [o for o in _set_orbits_brute(s, f) if not o & f]
            union_of_orbits = all(o <= t or not o & t for o in orbs)
            single = any(o == t for o in orbs)
            kind = classify_pair(s, f, t)
            assert (kind == "set_type") == single
            assert (kind in ("set_type", "extended_set_type")) == union_of_orbits


def test_classify_rejects_empty_f():
    with pytest.raises(StructureError):
        classify_pair(rc.cycle(5), set(), {1})
    with pytest.raises(StructureError):
        TypePair.of(rc.cycle(5), [], [1])


def test_equivariance_of_set_types():
    s = rc.cycle(6)
    f, t = frozenset({0}), frozenset({1, 5})
    assert classify_pair(s, f, t) == "set_type"
    for p in automorphisms(s).iter_elements():
        assert classify_pair(s, image(p, f), image(p, t)) == "set_type"


def test_invariance_on_verified_set_type(rado40):
    tp = candidate(rado40)
    assert set_type_invariance_check(rado40, tp).ok


def test_invariance_catches_corrupted_t():
    s = rc.cycle(6)
    # {1, 4} is not fixed by the reflection through 0
    bad = TypePair(frozenset({0}), frozenset({1, 4}), frozenset(range(6)), "set_type")
    w = set_type_invariance_check(s, bad)
    assert not w.ok and w.perm is not None
    assert image(w.perm, {0}) == {0} and image(w.perm, {1, 4}) != {1, 4}


def test_invariance_vacuous_when_stabilizer_trivial():
    s = rc.path(4)
    tp = TypePair.of(s, {0, 1, 2}, {3})
    assert set_type_invariance_check(s, tp).ok


def test_invariance_needs_set_type():
    tp = TypePair(frozenset({1}), frozenset({0}), frozenset(range(3)), None)
    with pytest.raises(StructureError):
        set_type_invariance_check(rc.path(3), tp)


def test_cover_rado_pairs(rado60):
    tp = candidate(rado60)
    assert cover_check(rado60, tp, h_size=2, tau=1).ok


def test_cover_complete_graph():
    s = rc.complete(4)
    tp = TypePair.of(s, {0}, {1, 2, 3})
    # one image of T misses exactly the moved point, two images cover T
    assert cover_check(s, tp, h_size=1, tau=1).surplus == 1
    res = cover_check(s, tp, h_size=2, tau=1)
    assert not res.ok and res.surplus == 0 and len(res.witness) == 2


def test_cover_singleton_t():
    s = rc.cycle(5)
    tp = TypePair.of(s, {0}, {1, 4})
    single = TypePair(frozenset({0}), frozenset({1}), frozenset(range(5)), None)
    assert not cover_check(s, single, 1, tau=2).ok
    assert cover_check(s, tp, 1, tau=1).checked == cover_check(s, tp, 1, tau=1).total


def test_cover_monotone():
    s = rc.cycle(8)
    tp = TypePair.of(s, {0}, {1, 7})
    for h in range(1, 4):
        for tau in range(1, 3):
            if cover_check(s, tp, h, tau).ok:
                assert cover_check(s, tp, h, max(tau - 1, 1)).ok
                assert cover_check(s, tp, h - 1, tau).ok


def test_cover_rejects_bad_tau():
    with pytest.raises(ValueError):
        cover_check(rc.cycle(5), TypePair.of(rc.cycle(5), {0}, {1, 4}), 1, 0)


def test_rado_all_items_pass(rado40):
    r = check_fixing_type(rado40, candidate(rado40))
    assert [r.items[i].verdict for i in range(1, 7)] == [NA, NA, PASS, PASS, PASS, PASS]


def test_tournament_all_items_pass():
    s, _ = make(FamilySpec("tournament", (), cap=31))
    assert check_fixing_type(s, candidate(s)).passed()


def test_c6_item5_pointwise_versus_setwise():
    s = rc.cycle(6)
    tp = TypePair.of(s, {0}, {1, 5})
    elems = brute_force_automorphisms(s)
    fix_t = [p for p in elems if p[1] == 1 and p[5] == 5]
    assert fix_t == [tuple(range(6))]
    assert check_fixing_type(s, tp).items[5].verdict == PASS
    # only the setwise stabilizer of T moves the remaining points
    keep_t = [p for p in elems if {p[1], p[5]} == {1, 5}]
    assert any(p[2] == 4 for p in keep_t)


def test_item5_failure():
    # K_2 plus two isolated points: fixing T = {1} leaves the isolated pair free
    s = rc.graph(4, [(0, 1)])
    r = check_fixing_type(s, TypePair.of(s, {0}, {1}))
    assert r.items[5].verdict == FAIL


def test_item5_restatement(rado40):
    tp = candidate(rado40)
    stab = pointwise_stabilizer(automorphisms(rado40), tp.t)
    rest = set(range(rado40.n)) - tp.t - tp.f
    assert all(p[x] == x for p in stab.iter_elements() for x in rest)


def test_hat_split_items():
    s, _ = make(FamilySpec("hat", ("tournament",), cap=11))
    tp = candidate(s)
    assert tp.split(s)
    r = check_fixing_type(s, tp)
    assert r.items[1].verdict == PASS and r.items[2].verdict == PASS
    assert r.passed()


def test_item2_failure_is_genuine():
    s, _ = make(FamilySpec("hat", ("tournament",), cap=7))
    tp = candidate(s)
    r = check_fixing_type(s, tp)
    assert r.items[2].verdict == FAIL
    g = automorphisms(s)
    g0 = [p for p in g.iter_elements() if image(p, tp.a0) == tp.a0]
    # some element of G sends a point of A0 into A0 in a way no element of G0 copies
    assert any(
        p[x] in tp.a0 and not any(q[x] == p[x] for q in g0)
        for p in g.iter_elements() for x in tp.a0
    )


def test_item_budget_limit_reported():
    s, _ = make(FamilySpec("hat", ("tournament",), cap=11))
    r = check_fixing_type(s, candidate(s), Budgets(cap=3))
    assert r.items[1].verdict == LIMITED and r.items[2].verdict == LIMITED


def test_candidates():
    s, _ = make(FamilySpec("poset", (), cap=20))
    tp = candidate(s)
    comparable = {y for x, y in s.rels[0] if x == 0} | {x for x, y in s.rels[0] if y == 0}
    assert tp.f == {0} and tp.t == set(range(1, s.n)) - comparable

    s = make(FamilySpec("niinf", (2, 5)))[0]
    tp = candidate(s)
    a = 0
    b = min(x for x in range(s.n) if (x, a) in s.rels[0] and s.meta["cls"][x] == 1)
    out = lambda v: {y for x, y in s.rels[0] if x == v}
    assert tp.f == {a, b} and tp.t == (out(a) | out(b)) - {a, b}

    s = make(FamilySpec("knfree", (3,)))[0]
    tp = candidate(s)
    assert tp.f == {0} and tp.t == rc.neighbors(s, 0)


def test_free_amalgamation_candidate_soundness(rado40):
    tp = candidate(rado40)
    witnesses = {b for b in range(rado40.n) if b not in tp.f
                 and any(set(t) <= tp.f | {b} for t in rado40.rels[0])}
    assert tp.t == witnesses


def test_unknown_candidate_family():
    with pytest.raises(StructureError):
        candidate(rc.cycle(5), "cycle")


def test_construct_zero_steps(rado40):
    tp = candidate(rado40)
    part, trace = construct_partition(rado40, tp, 0)
    assert {x for x in range(rado40.n) if part.blocks[x] == part.blocks[0]} == tp.f | tp.t
    assert trace.sizes() == []


def test_construct_rado60_two_steps(rado60):
    tp = candidate(rado60)
    part, trace = construct_partition(rado60, tp, 2)
    assert trace.sizes() == [1, 2]
    assert verify_trace(rado60, tp, trace) == []
    assert trace.stabilizer_order == automorphisms(rado60, part.blocks).order


def test_construct_rado40_three_steps(rado40):
    tp = candidate(rado40)
    part, trace = construct_partition(rado40, tp, 3)
    assert trace.sizes() == [1, 2, 4]
    assert verify_trace(rado40, tp, trace) == []
    assert (trace.stabilizer_order == 1) == is_distinguishing(rado40, part)


def test_stage_exhaustion_is_reported(rado60):
    _, trace = construct_partition(rado60, candidate(rado60), 5)
    assert trace.outcome.startswith("stage exhausted") or trace.outcome.startswith("T exhausted")


def test_verify_trace_catches_mutation(rado40):
    tp = candidate(rado40)
    _, trace = construct_partition(rado40, tp, 2)
    trace.s[1] = frozenset(set(trace.s[1]) | set(itertools.islice(iter(tp.t), 1)))
    assert verify_trace(rado40, tp, trace)


def test_q2_chain_single_point():
    part, rep = q2_chain(q2(1))
    assert part.blocks == (0,) and rep.complete


def test_q2_chain_reversal_is_partial():
    s = q2(8, perm=list(range(8))[::-1])
    part, rep = q2_chain(s)
    assert all((a, b) in s.rels[0] for a, b in zip(rep.chain, rep.chain[1:]))
    assert not rep.complete


def test_q2_stages_rigid():
    for n in range(1, 9):
        assert len(brute_force_automorphisms(q2(n, seed=n))) == 1
