import itertools
import math

import pytest
from hypothesis import given, settings

from distlab import relcore as rc
from distlab.disting import (
    CENSUS_MAX_N,
    Partition,
    brute_force_distinguishing_number,
    distinguishing_number,
    exists_distinguishing,
    is_distinguishing,
    least_k_2binom,
    least_k_binom,
    parse_partition,
    rigidity_census,
)
from distlab.relcore import StructureError

from conftest import small_digraphs, small_graphs


def _rgs(n):
    """All restricted-growth strings of length n, lexicographic."""
    def rec(prefix, used):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for c in range(used + 1):
            yield from rec(prefix + [c], max(used, c + 1))
    yield from rec([], 0)


@pytest.mark.parametrize("s", [rc.cycle(4), rc.cycle(5), rc.path(4), rc.mkn(2, 2), rc.dicycle(4), rc.complete(3)])
def test_against_brute_force(s):
    assert distinguishing_number(s).k == brute_force_distinguishing_number(s)


@given(small_graphs(max_n=6))
@settings(max_examples=40, deadline=None)
def test_random_graphs_against_brute_force(g):
    assert distinguishing_number(g).k == brute_force_distinguishing_number(g)


@given(small_digraphs(max_n=5))
@settings(max_examples=40, deadline=None)
def test_random_digraphs_against_brute_force(g):
    assert distinguishing_number(g).k == brute_force_distinguishing_number(g)


def test_witness_is_least_restricted_growth_string():
    for s in (rc.cycle(5), rc.path(5), rc.line_graph_k33()):
        res = distinguishing_number(s)
        first = next(w for w in _rgs(s.n) if max(w) + 1 == res.k and is_distinguishing(s, w))
        assert res.witness.blocks == first


def test_witness_distinguishes():
    res = distinguishing_number(rc.cycle(7))
    assert is_distinguishing(rc.cycle(7), res.witness)


def test_exceeding_bound_is_reported():
    res = distinguishing_number(rc.complete(4), max_k=3)
    assert res.exceeded and res.as_dict("K4")["D"] == ">3"


def test_exists_distinguishing():
    assert exists_distinguishing(rc.cycle(4), 2) is None
    assert exists_distinguishing(rc.cycle(6), 2) is not None


def test_rigid_structures_have_d_one():
    assert distinguishing_number(rc.linear_order(7)).k == 1


def test_partition_validation_and_text():
    with pytest.raises(StructureError):
        Partition((0, 2))
    p = Partition.from_labels("bab")
    assert p.blocks == (0, 1, 0) and p.k == 2
    assert parse_partition(str(p)) == p
    with pytest.raises(StructureError):
        parse_partition("partition 3: 0 1 0")
    assert Partition.from_blocks(3, [[2], [0, 1]]).blocks == (0, 0, 1)


def test_is_distinguishing_length_check():
    with pytest.raises(StructureError):
        is_distinguishing(rc.cycle(4), [0, 1])


def test_least_k_formulas():
    for m in range(1, 8):
        for n in range(1, 5):
            k = least_k_binom(m, n)
            assert math.comb(k, n) >= m and (k == n or math.comb(k - 1, n) < m)
    assert [least_k_2binom(n) for n in range(1, 8)] == [1, 2, 3, 3, 3, 3, 4]
    with pytest.raises(ValueError):
        least_k_binom(0, 2)


def test_census_small():
    # rigid labelled graphs: n=1 one graph, none for 2..5, n=6 has 8 unlabelled, each with 720 labellings
    counts = rigidity_census(6)
    assert counts[1] == 1
    assert all(counts[n] == 0 for n in range(2, 6))
    assert counts[6] == 8 * 720


def test_census_cap():
    with pytest.raises(ValueError):
        rigidity_census(CENSUS_MAX_N + 1)


def test_two_labelings_of_lk33_brute_force():
    s = rc.line_graph_k33()
    assert not any(is_distinguishing(s, w) for w in itertools.product((0, 1), repeat=9))
