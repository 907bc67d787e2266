"""Fixing types on finite stages: classification, cover property, the six-item
check and the two-block partition construction built from a fixing type.

Throughout, ``G`` is the automorphism group of the stage, ``G_(F)`` the
pointwise and ``G_{F}`` the setwise stabilizer of ``F``.  When a split
``A_0`` is active, ``G_0`` is the setwise stabilizer of ``A_0`` acting on it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable

from distlab.autgroup import (
    ELEMENT_CAP,
    CapacityError,
    Group,
    Perm,
    automorphisms,
    extends_to_full,
    find_automorphism,
    image,
    is_automorphism,
    orbits,
    partition_stabilizer,
    pointwise_stabilizer,
    setwise_stabilizer,
)
from distlab.disting import Partition
from distlab.relcore import Structure, StructureError, induced

KINDS = ("type", "set_type", "extended_set_type")
PASS, FAIL, NA, LIMITED = "pass", "fail", "n/a", "budget-limited"


@dataclass(frozen=True)
class TypePair:
    f: frozenset
    t: frozenset
    a0: frozenset
    kind: str | None = None

    @classmethod
    def of(cls, s: Structure, f: Iterable[int], t: Iterable[int], a0: Iterable[int] | None = None) -> TypePair:
        """Validated pair with ``kind`` computed by :func:`classify_pair`."""
        f, t = frozenset(f), frozenset(t)
        a0 = frozenset(range(s.n)) if a0 is None else frozenset(a0)
        if not f:
            raise StructureError("F must be non-empty")
        if f & t:
            raise StructureError("F and T must be disjoint")
        if not t <= a0 or not f <= a0:
            raise StructureError("F and T must lie inside A0")
        if any(not 0 <= x < s.n for x in f | t | a0):
            raise StructureError("element out of range")
        return cls(f, t, a0, classify_pair(s, f, t, a0))

    def split(self, s: Structure) -> bool:
        return len(self.a0) < s.n


def _split_group(s: Structure, a0: frozenset) -> Group:
    g = automorphisms(s)
    return g if len(a0) == s.n else setwise_stabilizer(g, a0)


def classify_pair(s: Structure, f: Iterable[int], t: Iterable[int], a0: Iterable[int] | None = None) -> str | None:
    """``set_type``, ``type``, ``extended_set_type`` or None, strongest first.

    A ``type`` that is not a set type is a proper part of a ``G_{F}``-orbit, so
    the three outcomes never overlap.
    """
    f, t = frozenset(f), frozenset(t)
    if not f:
        raise StructureError("F must be non-empty")
    if not t:
        raise StructureError("T must be non-empty")
    if f & t:
        raise StructureError("F and T must be disjoint")
    a0 = frozenset(range(s.n)) if a0 is None else frozenset(a0)
    g0 = _split_group(s, a0)
    set_orbits = orbits(setwise_stabilizer(g0, f), a0)
    hit = [set(o) for o in set_orbits if t & set(o)]
    if len(hit) == 1 and hit[0] == t:
        return "set_type"
    point_orbits = orbits(pointwise_stabilizer(g0, f), a0)
    if any(set(o) == t for o in point_orbits):
        return "type"
    if set().union(*hit) == t:
        return "extended_set_type"
    return None


@dataclass
class Witness:
    ok: bool
    detail: str = ""
    perm: Perm | None = None


def set_type_invariance_check(s: Structure, tp: TypePair, cap: int = ELEMENT_CAP) -> Witness:
    """``G_{F}`` fixes ``T`` setwise and ``h(F) = k(F)`` forces ``h(T) = k(T)``."""
    if tp.kind not in ("set_type", "extended_set_type"):
        raise StructureError(f"pair is {tp.kind}, not a set type")
    g0 = _split_group(s, tp.a0)
    for p in setwise_stabilizer(g0, tp.f).generators:
        if image(p, tp.t) != tp.t:
            return Witness(False, "setwise stabilizer of F moves T", p)
    seen: dict[frozenset, tuple[frozenset, Perm]] = {}
    for p in g0.elements(cap):
        fi, ti = image(p, tp.f), image(p, tp.t)
        prev = seen.setdefault(fi, (ti, p))
        if prev[0] != ti:
            return Witness(False, "two elements agree on F but not on T", p)
    return Witness(True, f"{len(seen)} images of F checked")


@dataclass
class CoverResult:
    ok: bool
    surplus: int
    witness: tuple[frozenset, ...]
    checked: int
    total: int

    @property
    def exhaustive(self) -> bool:
        return self.checked == self.total


def moved_images(g: Group, tp: TypePair, cap: int = ELEMENT_CAP) -> list[frozenset]:
    """Distinct sets ``h(T)`` for ``h`` moving ``F``, in first-seen order."""
    out: dict[frozenset, None] = {}
    for p in g.elements(cap):
        if image(p, tp.f) != tp.f:
            out.setdefault(image(p, tp.t), None)
    return list(out)


def cover_check(s: Structure, tp: TypePair, h_size: int = 1, tau: int = 1,
                max_subsets: int = 2_000_000, cap: int = ELEMENT_CAP) -> CoverResult:
    """Least ``|T \\ union h(T)|`` over sets of at most ``h_size`` elements moving ``F``.

    Only the images ``h(T)`` matter and unions only shrink the remainder, so the
    worst case is among sets of exactly ``min(h_size, #images)`` distinct images.
    """
    if tau < 1:
        raise ValueError("tau must be at least 1")
    if h_size < 0:
        raise ValueError("h_size must be non-negative")
    imgs = moved_images(_split_group(s, tp.a0), tp, cap)
    size = min(h_size, len(imgs))
    total = math.comb(len(imgs), size)
    worst, witness, checked = len(tp.t), (), 0
    for combo in itertools.islice(itertools.combinations(range(len(imgs)), size), max_subsets):
        checked += 1
        covered = set().union(*(imgs[i] for i in combo))
        left = len(tp.t - covered)
        if left < worst:
            worst, witness = left, tuple(imgs[i] for i in combo)
            if worst == 0:
                break
    if worst == 0:
        checked = total
    return CoverResult(worst >= tau, worst, witness, checked, total)


# -- the six-item check ------------------------------------------------------

@dataclass
class Budgets:
    h_size: int = 1
    tau: int = 1
    subset_size: int = 3
    cap: int = ELEMENT_CAP
    max_subsets: int = 2_000_000


@dataclass
class Item:
    verdict: str
    detail: str = ""


@dataclass
class CheckReport:
    items: dict[int, Item]
    budgets: Budgets
    surplus: int | None = None
    g_witness: dict[int, tuple[int, Perm]] = field(default_factory=dict)

    def passed(self, which: Iterable[int] = range(1, 7)) -> bool:
        return all(self.items[i].verdict in (PASS, NA) for i in which)

    def exact(self, which: Iterable[int]) -> bool:
        return all(self.items[i].verdict != LIMITED for i in which)

    def lines(self) -> list[str]:
        return [f"item {i}: {it.verdict}" + (f" ({it.detail})" if it.detail else "") for i, it in sorted(self.items.items())]

    def as_dict(self) -> dict:
        return {
            "items": {str(i): {"verdict": it.verdict, "detail": it.detail} for i, it in self.items.items()},
            "budgets": vars(self.budgets),
            "surplus": self.surplus,
        }


def _item1(s: Structure, tp: TypePair, b: Budgets) -> Item:
    if not tp.split(s):
        return Item(NA, "trivial split")
    a0 = sorted(tp.a0)
    sub, table = induced(s, a0)
    sub_group = automorphisms(sub)
    if sub_group.order > b.cap:
        return Item(LIMITED, f"|Aut(A0)| = {sub_group.order}")
    for p in sub_group.iter_elements():
        g0 = {table[i]: table[p[i]] for i in range(len(table))}
        ok, _ = extends_to_full(s, a0, g0)
        if not ok:
            return Item(FAIL, "non-extending map " + " ".join(f"{x}->{y}" for x, y in sorted(g0.items()) if x != y))
    return Item(PASS, f"{sub_group.order} automorphisms of A0 extend")


def _item2(s: Structure, tp: TypePair, b: Budgets) -> Item:
    if not tp.split(s):
        return Item(NA, "trivial split")
    g = automorphisms(s)
    if g.order > b.cap:
        return Item(LIMITED, f"|G| = {g.order}")
    g0 = setwise_stabilizer(g, tp.a0)
    restricted = list(g0.iter_elements())
    unresolved = []
    for p in g.iter_elements():
        dom = sorted(x for x in tp.a0 if p[x] in tp.a0)
        target = tuple(p[x] for x in dom)
        if any(tuple(q[x] for x in dom) == target for q in restricted):
            continue
        unresolved.append((p, dom))
    limited = False
    for p, dom in unresolved:
        sizes = range(1, min(b.subset_size, len(dom)) + 1)
        if len(dom) > b.subset_size:
            limited = True
        for k in sizes:
            for sub in itertools.combinations(dom, k):
                target = tuple(p[x] for x in sub)
                if not any(tuple(q[x] for x in sub) == target for q in restricted):
                    return Item(FAIL, f"no element of G0 agrees with g on {list(sub)}")
    if limited:
        return Item(LIMITED, f"subsets up to size {b.subset_size} agree")
    return Item(PASS, f"{g.order} elements of G checked")


def _item3(s: Structure, tp: TypePair, b: Budgets) -> tuple[Item, int | None]:
    if tp.kind not in ("set_type", "extended_set_type"):
        return Item(FAIL, f"T is {tp.kind or 'not a union of orbits'}"), None
    try:
        cov = cover_check(s, tp, b.h_size, b.tau, b.max_subsets, b.cap)
    except CapacityError as exc:
        return Item(LIMITED, str(exc)), None
    if not cov.ok:
        return Item(FAIL, f"{tp.kind}; surplus {cov.surplus} < tau {b.tau}"), cov.surplus
    if not cov.exhaustive:
        return Item(LIMITED, f"{cov.checked}/{cov.total} subsets, surplus {cov.surplus}"), cov.surplus
    return Item(PASS, f"{tp.kind}; surplus {cov.surplus} over {cov.total} subsets"), cov.surplus


def _colors_a0(s: Structure, tp: TypePair):
    return None if not tp.split(s) else [x in tp.a0 for x in range(s.n)]


def item4_witness(s: Structure, tp: TypePair, b: int) -> tuple[int, Perm] | None:
    """Least ``a`` in ``F`` and a ``g`` preserving ``A_0`` with ``g(F) = F - {a} + {b}``."""
    colors = _colors_a0(s, tp)
    f = sorted(tp.f)
    for a in f:
        target = sorted((tp.f - {a}) | {b})
        for images in itertools.permutations(target):
            p = find_automorphism(s, list(zip(f, images)), colors)
            if p is not None:
                return a, p
    return None


def _item4(s: Structure, tp: TypePair) -> tuple[Item, dict]:
    found = {}
    for b in sorted(tp.t):
        w = item4_witness(s, tp, b)
        if w is None:
            return Item(FAIL, f"no witness for b = {b}"), found
        found[b] = w
    return Item(PASS, f"{len(found)} witnesses"), found


def _item5(s: Structure, tp: TypePair) -> Item:
    rest = set(range(s.n)) - tp.t - tp.f
    for o in orbits(pointwise_stabilizer(automorphisms(s), tp.t), rest):
        if len(o) > 1:
            return Item(FAIL, f"orbit {o} of the pointwise stabilizer of T")
    return Item(PASS)


def _item6(s: Structure, tp: TypePair) -> Item:
    rest = set(range(s.n)) - tp.f
    for o in orbits(pointwise_stabilizer(automorphisms(s), rest), tp.f):
        if len(o) > 1:
            return Item(FAIL, f"orbit {o} inside F")
    return Item(PASS)


def check_fixing_type(s: Structure, tp: TypePair, budgets: Budgets | None = None) -> CheckReport:
    b = budgets or Budgets()
    items: dict[int, Item] = {}
    for i, fn in ((1, _item1), (2, _item2)):
        try:
            items[i] = fn(s, tp, b)
        except CapacityError as exc:
            items[i] = Item(LIMITED, str(exc))
    items[3], surplus = _item3(s, tp, b)
    items[4], wit = _item4(s, tp)
    items[5] = _item5(s, tp)
    items[6] = _item6(s, tp)
    return CheckReport(items, b, surplus, wit)


# -- candidates ----------------------------------------------------------------

def _out(s: Structure, a: int) -> set[int]:
    return {y for x, y in s.rels[0] if x == a}


def _in(s: Structure, a: int) -> set[int]:
    return {x for x, y in s.rels[0] if y == a}


def candidate(s: Structure, family: str | None = None) -> TypePair:
    """Default ``(F, T, A_0)`` on least-index designated elements."""
    family = family or s.meta.get("family")
    if family in ("rado", "knfree"):
        arity = min(s.sig.arities)
        f = set(range(arity - 1))
        t = {b for ri, rel in enumerate(s.rels) if s.sig.arities[ri] == arity
             for tup in rel for b in tup if b not in f and set(tup) <= f | {b}}
        return TypePair.of(s, f, t)
    if family == "h3":
        edges = {frozenset(e) for e in s.rels[0]}
        f = set(min(tuple(sorted(e)) for e in edges))
        t = {x for x in range(s.n) if x not in f
             and all(frozenset(pair) | {x} in edges for pair in itertools.combinations(f, 2))}
        return TypePair.of(s, f, t)
    if family in ("tournament", "dn"):
        return TypePair.of(s, {0}, _out(s, 0))
    if family == "hat":
        a0 = {x for x in range(s.n) if s.meta["copy"][x] == 0}
        return TypePair.of(s, {0}, _out(s, 0) & a0, a0)
    if family == "poset":
        comparable = _out(s, 0) | _in(s, 0)
        return TypePair.of(s, {0}, set(range(1, s.n)) - comparable)
    if family == "pstar":
        cls = s.meta["cls"]
        a0 = {x for x in range(s.n) if cls[x] == 0}
        p = min(a0)
        less = {tuple(e) for e in s.meta["base_poset"]}
        t = {x for x in a0 if x != p and (p, x) not in less and (x, p) not in less}
        return TypePair.of(s, {p}, t, a0)
    if family == "niinf":
        cls = s.meta["cls"]
        if max(cls) + 1 >= 3:
            return TypePair.of(s, {0}, _out(s, 0))
        b = min(x for x in _in(s, 0) if cls[x] == 1)
        return TypePair.of(s, {0, b}, (_out(s, 0) | _out(s, b)) - {0, b})
    raise StructureError(f"no fixing-type candidate for family {family!r}")


# -- the partition construction -------------------------------------------------

@dataclass
class ConstructionTrace:
    b: list[int] = field(default_factory=list)
    a: list[int] = field(default_factory=list)
    g: list[Perm] = field(default_factory=list)
    t_i: list[frozenset] = field(default_factory=list)
    s: list[frozenset] = field(default_factory=list)
    c: list[frozenset] = field(default_factory=list)
    outcome: str = ""
    stabilizer_order: int | None = None

    def sizes(self) -> list[int]:
        return [len(x) for x in self.s]


def _images_by_f(g: Group, tp: TypePair, cap: int) -> dict[frozenset, set[int]]:
    """For each image ``h(F)``, the union of the matching sets ``h(T)``."""
    out: dict[frozenset, set[int]] = {}
    for p in g.elements(cap):
        out.setdefault(image(p, tp.f), set()).update(image(p, tp.t))
    return out


def construct_partition(s: Structure, tp: TypePair, i_max: int, cap: int = ELEMENT_CAP) -> tuple[Partition, ConstructionTrace]:
    """Two-block partition ``F + T + S | rest`` following the construction's steps.

    ``i_max`` counts steps; the loop also ends when ``T`` is exhausted or the
    stage has too few admissible elements for the next ``S_i``.
    """
    if i_max < 0:
        raise ValueError("i_max must be non-negative")
    images = _images_by_f(automorphisms(s), tp, cap)
    trace = ConstructionTrace()
    used: set[int] = set()
    total = 0
    order = sorted(tp.t)
    trace.outcome = f"completed {i_max} steps"
    for i in range(i_max):
        if i >= len(order):
            trace.outcome = f"T exhausted after {i} steps"
            break
        b = order[i]
        w = item4_witness(s, tp, b)
        if w is None:
            raise StructureError(f"no item 4 witness for b = {b}")
        a, g = w
        c = frozenset(tp.f | set(order[:i]) | used)
        excluded = set().union(*(ts for fi, ts in images.items() if fi <= c))
        ti = image(g, tp.t)
        pool = sorted(ti - excluded)
        need = 1 + total
        if len(pool) < need:
            trace.outcome = f"stage exhausted at step {i}: {len(pool)} admissible, {need} needed"
            break
        si = frozenset(pool[:need])
        trace.b.append(b)
        trace.a.append(a)
        trace.g.append(g)
        trace.t_i.append(ti)
        trace.c.append(c)
        trace.s.append(si)
        used |= si
        total += need
    b0 = tp.f | tp.t | used
    part = Partition(tuple(0 if x in b0 else 1 for x in range(s.n)))
    trace.stabilizer_order = partition_stabilizer(s, part.blocks).order
    return part, trace


def verify_trace(s: Structure, tp: TypePair, trace: ConstructionTrace, cap: int = ELEMENT_CAP) -> list[str]:
    """Re-check every recorded step from scratch; returns the violations found."""
    bad = []
    elements = automorphisms(s).elements(cap)
    total = 0
    for i, (b, a, g, ti, si, c) in enumerate(zip(trace.b, trace.a, trace.g, trace.t_i, trace.s, trace.c)):
        if not is_automorphism(s, g):
            bad.append(f"step {i}: g is not an automorphism")
        if image(g, tp.f) != (tp.f - {a}) | {b} or a not in tp.f:
            bad.append(f"step {i}: g(F) is not F - {{{a}}} + {{{b}}}")
        if tp.split(s) and image(g, tp.a0) != tp.a0:
            bad.append(f"step {i}: g moves A0")
        if ti != image(g, tp.t):
            bad.append(f"step {i}: T_i is not g(T)")
        expect_c = tp.f | set(trace.b[:i]) | set().union(*trace.s[:i])
        if c != expect_c:
            bad.append(f"step {i}: wrong context set")
        if si & tp.t:
            bad.append(f"step {i}: (a) S_i meets T")
        if not si <= ti:
            bad.append(f"step {i}: (b) S_i not inside T_i")
        if len(si) != 1 + total:
            bad.append(f"step {i}: (c) |S_i| = {len(si)}, expected {1 + total}")
        for p in elements:
            if all(p[x] in c for x in tp.f) and si & image(p, tp.t):
                bad.append(f"step {i}: (d) S_i meets some g(T) with g(F) inside C_i")
                break
        for j in range(i):
            if trace.s[j] & si:
                bad.append(f"steps {j},{i}: S_j and S_i overlap")
        total += len(si)
    return bad


# -- two linear orders ------------------------------------------------------------

@dataclass
class ChainReport:
    chain: list[int]
    pairs: list[tuple[int, int]]
    unseparated: list[tuple[int, int]]

    @property
    def complete(self) -> bool:
        return not self.unseparated


def q2_chain(s: Structure) -> tuple[Partition, ChainReport]:
    """Greedy ``<=``-increasing chain ``B_0`` meeting every pair adjacent in the second order.

    The chain starts at the least element of the first order; each further
    step takes the first adjacent pair (in the second order) with no endpoint
    in the chain, and appends its endpoint that is smallest among those above
    the chain's last element.  Pairs whose endpoints both lie below the chain
    are reported as unseparated.
    """
    if len(s.rels) < 2 or s.n == 0:
        raise StructureError("q2_chain needs two orders on a non-empty domain")
    first, second = s.rels[0], s.rels[1]

    def rank(rel, x):
        return sum(1 for y in range(s.n) if (y, x) in rel)

    by_first = sorted(range(s.n), key=lambda x: rank(first, x))
    by_second = sorted(range(s.n), key=lambda x: rank(second, x))
    pos = {x: i for i, x in enumerate(by_first)}
    pairs = list(zip(by_second, by_second[1:]))
    chain = [by_first[0]]
    while True:
        last = pos[chain[-1]]
        open_pairs = [p for p in pairs if not set(p) & set(chain)]
        step = None
        for p in open_pairs:
            ups = [x for x in p if pos[x] > last]
            if ups:
                step = min(ups, key=pos.get)
                break
        if step is None:
            break
        chain.append(step)
    unseparated = [p for p in pairs if not set(p) & set(chain)]
    part = Partition(tuple(0 if x in chain else 1 for x in range(s.n)))
    return part, ChainReport(chain, pairs, unseparated)
