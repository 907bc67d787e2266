import itertools

import pytest

from distlab import relcore as rc
from distlab.autgroup import automorphisms, orbits
from distlab.catalog import (
    FAMILIES,
    FamilySpec,
    UnknownFamily,
    admissible_for,
    extension_report,
    is_biorder,
    is_graph,
    is_poset,
    is_tournament,
    joint_witnesses,
    kn_free,
    make,
    niinf,
    no_independent,
    parity_ok,
    perp_classes,
    q2,
    qstar,
    s3,
    semigeneric,
    shift_classes,
)
from distlab.relcore import StructureError


def test_unknown_family_and_arity():
    with pytest.raises(UnknownFamily):
        FamilySpec("nope")
    with pytest.raises(StructureError):
        FamilySpec("cycle", ())


def test_simple_families_build():
    for name, (k, _) in FAMILIES.items():
        if k == 0 or name in ("wreath", "hat", "dn", "knfree", "niinf", "semigeneric"):
            continue
        s, cert = make(FamilySpec(name, (4,) * k))
        assert s.n > 0 and cert is None


def test_nested_tokens():
    s, _ = make(FamilySpec("wreath", ("dicycle:3", "empty:2")))
    assert s.n == 6
    h, _ = make(FamilySpec("hat", ("dicycle:3",)))
    assert h.n == 8 and h.meta["apex"] == [3, 7]


def test_cycle_fails_level_one():
    # C_5: no vertex adjacent to both ends of a non-edge and absent from the other
    cert = extension_report(rc.cycle(5), is_graph, 2)
    assert cert.level_achieved < 2 and cert.missing


def test_extension_report_on_complete_graph():
    cert = extension_report(rc.complete(5), is_graph, 1)
    # the isolated one-point extension over any vertex is missing
    assert cert.level_achieved == 0


@pytest.mark.parametrize("family,params,cap", [("rado", (), 40), ("knfree", (3,), 40), ("tournament", (), 31),
                                               ("h3", (), 19), ("dn", (2,), 31)])
def test_transitive_stages_reach_level_two(family, params, cap):
    s, cert = make(FamilySpec(family, params, cap=cap))
    assert cert.ok and cert.summary() == "level=2 missing=0"
    assert admissible_for(s, family)(s)
    assert len(orbits(automorphisms(s))) == 1
    # independent recomputation without the anchor shortcut
    assert extension_report(s, admissible_for(s, family), 2).level_achieved == 2


def test_knfree_stage_has_no_triangle():
    s, _ = make(FamilySpec("knfree", (3,), cap=40))
    adj = {v: rc.neighbors(s, v) for v in range(s.n)}
    assert not any(b in adj[a] and c in adj[a] and c in adj[b] for a, b, c in itertools.combinations(range(s.n), 3))


def test_stage_is_deterministic():
    a, _ = make(FamilySpec("rado", (), seed=3, cap=30))
    make.cache_clear()
    b, _ = make(FamilySpec("rado", (), seed=3, cap=30))
    assert a == b


def test_h3_joint_witnesses():
    s, _ = make(FamilySpec("h3", (), cap=19))
    assert joint_witnesses(s)


def test_poset_stage_is_a_poset_stuck_at_level_zero():
    s, cert = make(FamilySpec("poset", (), cap=20))
    assert is_poset(s)
    # finite posets have maximal elements, so nothing above them exists
    assert cert.level_achieved == 0


def test_age_predicates():
    assert is_tournament(rc.dicycle(3))
    assert not is_tournament(rc.dicycle(4))
    assert kn_free(3)(rc.cycle(5)) and not kn_free(3)(rc.complete(3))
    assert no_independent(2)(rc.dicycle(3)) and not no_independent(2)(rc.empty_digraph(2))
    assert is_poset(rc.linear_order(4)) and not is_poset(rc.dicycle(3))
    assert is_biorder(q2(5))


def test_niinf_classes_are_perpendicular():
    s = niinf(3, 4)
    assert perp_classes(s) == s.meta["cls"]
    # odd class counts come with a transitive Cayley orientation
    assert len(orbits(automorphisms(s))) == 1


def test_semigeneric_parity():
    for n, m in ((2, 4), (3, 3)):
        s = semigeneric(n, m, seed=1)
        assert parity_ok(s, s.meta["cls"])


def test_parity_detects_odd_square():
    # arcs from class 0 to class 1: 0->2, 0->3, 1->2 (three of four), so the square is odd
    s = rc.digraph(4, [(0, 2), (0, 3), (1, 2), (3, 1)])
    assert not parity_ok(s, [0, 0, 1, 1])


def test_shifted_families():
    assert is_tournament(qstar(3))
    # S(3) is oriented but has perpendicular pairs
    t = s3(2)
    arcs = t.rels[0]
    assert not any((b, a) in arcs for a, b in arcs)
    assert len(arcs) < t.n * (t.n - 1) // 2


def test_q2_orders_are_linear():
    s = q2(6, seed=2)
    assert is_biorder(s) and sorted(s.meta["rank"]) == list(range(6))


def _value(arcs):
    return lambda x, y: 1 if (x, y) in arcs else 2 if (y, x) in arcs else 0


def test_s3_shift_has_order_three():
    s = s3(3)
    cls = s.meta["cls"]
    once = shift_classes(_value(s.rels[0]), cls, s.n)
    twice = shift_classes(_value(once), cls, s.n)
    assert twice == set(rc.linear_order(s.n).rels[0])


def test_qstar_reversal_is_an_involution():
    s = qstar(4)
    cls = s.meta["cls"]
    back = {(y, x) if cls[x] != cls[y] else (x, y) for x, y in s.rels[0]}
    assert back == set(rc.linear_order(s.n).rels[0])


def test_knfree_excludes_triangle_type():
    s, _ = make(FamilySpec("knfree", (3,), cap=40))
    a, b = next(iter(s.rels[0]))
    # no vertex sees both ends of an edge, and the report does not ask for one
    assert not rc.neighbors(s, a) & rc.neighbors(s, b)
    assert extension_report(s, kn_free(3), 2).ok


def test_dn_stage_has_no_independent_pair():
    s, _ = make(FamilySpec("dn", (2,), cap=31))
    assert is_tournament(s)
