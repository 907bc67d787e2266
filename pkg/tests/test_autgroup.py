import math

import pytest
from hypothesis import given, settings

from distlab import relcore as rc
from distlab.autgroup import (
    CapacityError,
    automorphisms,
    brute_force_automorphisms,
    closure,
    compose,
    extends_to_full,
    find_automorphism,
    format_perm,
    inverse,
    is_automorphism,
    nontrivial_automorphism,
    orbit_of,
    orbits,
    parse_perm,
    partition_stabilizer,
    pointwise_stabilizer,
    setwise_stabilizer,
)
from distlab.relcore import StructureError

from conftest import small_digraphs, small_graphs


@pytest.mark.parametrize("s", [rc.cycle(4), rc.complete(3), rc.line_graph_k33(), rc.cycle(5), rc.mkn(3, 2),
                               rc.hat(rc.dicycle(3)), rc.dicycle(5), rc.path(4)])
def test_order_matches_brute_force(s):
    slow = brute_force_automorphisms(s)
    g = automorphisms(s)
    assert g.order == len(slow)
    assert closure(g.generators, s.n) == set(slow)
    assert sorted(g.iter_elements()) == sorted(slow)


def test_known_orders():
    assert automorphisms(rc.complete(5)).order == 120
    assert automorphisms(rc.cycle(7)).order == 14
    assert automorphisms(rc.linear_order(6)).order == 1


@given(small_graphs(max_n=6))
@settings(max_examples=60, deadline=None)
def test_group_matches_brute_force_on_graphs(g):
    assert automorphisms(g).order == len(brute_force_automorphisms(g))


@given(small_digraphs(max_n=5))
@settings(max_examples=60, deadline=None)
def test_group_matches_brute_force_on_digraphs(g):
    elems = set(automorphisms(g).iter_elements())
    assert elems == set(brute_force_automorphisms(g))


def test_perm_helpers():
    p, q = (1, 2, 0), (0, 2, 1)
    assert compose(p, q) == tuple(p[q[x]] for x in range(3))
    assert compose(p, inverse(p)) == (0, 1, 2)
    assert parse_perm(format_perm(p)) == p
    with pytest.raises(StructureError):
        parse_perm("perm 3: 0 0 1")


def test_stabilizers_on_cycle():
    g = automorphisms(rc.cycle(6))
    assert pointwise_stabilizer(g, [0]).order == 2
    assert setwise_stabilizer(g, [0, 3]).order == 4
    assert pointwise_stabilizer(g, [0, 1]).order == 1


def test_stabilizers_match_brute_force():
    s = rc.line_graph_k33()
    g = automorphisms(s)
    elems = brute_force_automorphisms(s)
    f = {0, 4}
    assert setwise_stabilizer(g, f).order == sum(1 for p in elems if {p[x] for x in f} == f)
    assert pointwise_stabilizer(g, f).order == sum(1 for p in elems if all(p[x] == x for x in f))


def test_partition_stabilizer():
    s = rc.cycle(4)
    assert partition_stabilizer(s, [0, 0, 1, 2]).order == 1
    assert partition_stabilizer(s, [0, 1, 0, 1]).order == 4
    with pytest.raises(StructureError):
        partition_stabilizer(s, [0, 1])


def test_orbits_least_first():
    assert orbits(automorphisms(rc.path(4))) == [[0, 3], [1, 2]]
    assert orbit_of(automorphisms(rc.path(3)), 1) == [1]


def test_nontrivial_automorphism():
    assert nontrivial_automorphism(rc.linear_order(4)) is None
    p = nontrivial_automorphism(rc.cycle(4))
    assert p is not None and is_automorphism(rc.cycle(4), p) and p != (0, 1, 2, 3)


def test_extends_to_full():
    s = rc.cycle(6)
    ok, p = extends_to_full(s, [0, 1], {0: 1, 1: 0})
    assert ok and p[0] == 1 and p[1] == 0
    # swapping 0 and 2 on the path 0-1-2-3 leaves no image for 3
    s = rc.path(4)
    ok, _ = extends_to_full(s, [0, 2], {0: 2, 2: 0})
    assert not ok
    with pytest.raises(StructureError):
        extends_to_full(s, [0, 1], {0: 1, 1: 0, 2: 2})


def test_find_automorphism_respects_pairs():
    s = rc.cycle(8)
    p = find_automorphism(s, [(0, 3)])
    assert p[0] == 3 and is_automorphism(s, p)
    assert find_automorphism(s, [(0, 1), (1, 3)]) is None


def test_capacity_error():
    g = automorphisms(rc.empty(9))
    assert g.order == math.factorial(9)
    with pytest.raises(CapacityError):
        g.elements(cap=1000)
