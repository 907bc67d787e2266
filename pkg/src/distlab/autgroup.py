"""Automorphism groups of finite relational structures.

Every group handled here is the automorphism group of a *coloured*
structure: the structure plus an invariant colouring of its domain.
Setwise, pointwise and partition stabilizers are obtained by refining the
colouring and searching again, so no group-theoretic algebra is needed.

The search is individualisation-refinement over pairs of colourings.  The
refinement is iterated colour refinement per relation and tuple position.
A group is stored as a stabilizer chain along a base; its generators are the
non-identity transversal elements.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from distlab.relcore import Structure, StructureError, induced

ELEMENT_CAP = 10**6

Perm = tuple[int, ...]


class CapacityError(RuntimeError):
    """A computation needed more group elements than the configured cap."""


def identity(n: int) -> Perm:
    return tuple(range(n))


def compose(p: Perm, q: Perm) -> Perm:
    """``p ∘ q``: apply ``q`` first, then ``p``."""
    return tuple(p[x] for x in q)


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for x, y in enumerate(p):
        inv[y] = x
    return tuple(inv)


def image(p: Perm, subset: Iterable[int]) -> frozenset[int]:
    return frozenset(p[x] for x in subset)


def format_perm(p: Perm) -> str:
    return f"perm {len(p)}: " + " ".join(map(str, p))


def parse_perm(text: str) -> Perm:
    head, _, body = text.partition(":")
    parts = head.split()
    if len(parts) != 2 or parts[0] != "perm" or not parts[1].isdigit():
        raise StructureError(f"bad permutation line {text!r}")
    p = tuple(int(x) for x in body.split())
    if len(p) != int(parts[1]) or sorted(p) != list(range(len(p))):
        raise StructureError(f"not a permutation of 0..{parts[1]}: {text!r}")
    return p


def is_automorphism(s: Structure, p: Sequence[int]) -> bool:
    if len(p) != s.n:
        return False
    return all(tuple(p[x] for x in t) in tuples for tuples in s.rels for t in tuples)


def normalize(colors: Sequence) -> tuple[int, ...]:
    """Replace arbitrary sortable labels by their ranks."""
    ranks = {c: i for i, c in enumerate(sorted(set(colors)))}
    return tuple(ranks[c] for c in colors)


# -- refinement -------------------------------------------------------------

def _signatures(inc, colors):
    return [
        (colors[v], tuple(sorted((ri, pos, tuple(colors[y] for y in t)) for ri, pos, t in inc[v])))
        for v in range(len(colors))
    ]


def _refine(inc_l, cl, inc_r=None, cr=None):
    """Jointly refine two colourings until stable.

    Returns the refined pair (``cr`` may be None for a one-sided refinement)
    or None when the two sides stop matching.
    """
    ncolors = len(set(cl))
    while True:
        sig_l = _signatures(inc_l, cl)
        sig_r = None
        if cr is not None:
            sig_r = _signatures(inc_r, cr)
            if Counter(sig_l) != Counter(sig_r):
                return None
        rank = {k: i for i, k in enumerate(sorted(set(sig_l)))}
        cl = tuple(rank[k] for k in sig_l)
        if sig_r is not None:
            cr = tuple(rank[k] for k in sig_r)
        if len(rank) == ncolors:
            return cl, cr
        ncolors = len(rank)


def _individualize(colors, x):
    return tuple(2 * c + (v == x) for v, c in enumerate(colors))


def _target_cell(colors) -> list[int] | None:
    """Cell of the least element that is not alone in its colour class."""
    counts = Counter(colors)
    for v, c in enumerate(colors):
        if counts[c] > 1:
            return [u for u in range(len(colors)) if colors[u] == c]
    return None


class _Searcher:
    """Individualisation-refinement search for structure maps ``left -> right``."""

    def __init__(self, left: Structure, right: Structure | None = None):
        self.left = left
        self.right = right if right is not None else left
        self.inc_l = left.incidence()
        self.inc_r = self.inc_l if right is None else self.right.incidence()

    def refine(self, cl, cr):
        return _refine(self.inc_l, cl, self.inc_r, cr)

    def refine_one(self, c):
        return _refine(self.inc_l, c)[0]

    def pin(self, cl, cr, pairs):
        """Individualise prescribed pairs one after the other."""
        for x, y in pairs:
            if cl[x] != cr[y]:
                return None
            res = self.refine(_individualize(cl, x), _individualize(cr, y))
            if res is None:
                return None
            cl, cr = res
        return cl, cr

    def _leaf(self, cl, cr) -> Perm | None:
        where = {c: v for v, c in enumerate(cr)}
        p = tuple(where[c] for c in cl)
        right_rels = self.right.rels
        for tuples, target in zip(self.left.rels, right_rels):
            for t in tuples:
                if tuple(p[x] for x in t) not in target:
                    return None
        return p

    def search(self, cl, cr) -> Perm | None:
        """Least-image-first depth-first search below matched colourings."""
        cell = _target_cell(cl)
        if cell is None:
            return self._leaf(cl, cr)
        x = cell[0]
        color = cl[x]
        for y in (u for u in range(len(cr)) if cr[u] == color):
            res = self.refine(_individualize(cl, x), _individualize(cr, y))
            if res is None:
                continue
            found = self.search(*res)
            if found is not None:
                return found
        return None


def find_isomorphism(a: Structure, b: Structure) -> dict[int, int] | None:
    if a.sig != b.sig or a.n != b.n:
        return None
    if a.n == 0:
        return {}
    srch = _Searcher(a, b)
    res = srch.refine((0,) * a.n, (0,) * b.n)
    if res is None:
        return None
    p = srch.search(*res)
    return None if p is None else dict(enumerate(p))


# -- groups -----------------------------------------------------------------

@dataclass
class Group:
    """Automorphisms of ``base`` preserving the colouring ``colors``.

    ``levels`` is a stabilizer chain: pairs of a base point and a transversal
    mapping each point of its orbit to a group element carrying the base point
    there, where each level's elements fix all earlier base points.
    """

    base: Structure
    colors: tuple[int, ...]
    levels: list[tuple[int, dict[int, Perm]]]
    _elements: list[Perm] | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def order(self) -> int:
        return math.prod(len(t) for _, t in self.levels)

    @property
    def generators(self) -> list[Perm]:
        idp = identity(self.n)
        gens = []
        for _, trans in self.levels:
            gens.extend(p for y, p in sorted(trans.items()) if p != idp)
        return gens

    @property
    def base_points(self) -> list[int]:
        return [b for b, _ in self.levels]

    def is_trivial(self) -> bool:
        return self.order == 1

    def iter_elements(self) -> Iterator[Perm]:
        """Every element exactly once, as products of transversal elements."""
        idp = identity(self.n)
        trans = [sorted(t.values()) for _, t in self.levels]
        if not trans:
            yield idp
            return
        for combo in itertools.product(*trans):
            p = idp
            for t in combo:
                p = compose(p, t)
            yield p

    def elements(self, cap: int = ELEMENT_CAP) -> list[Perm]:
        if self.order > cap:
            raise CapacityError(f"group of order {self.order} exceeds element cap {cap}")
        if self._elements is None:
            self._elements = sorted(self.iter_elements())
        return self._elements

    def __contains__(self, p) -> bool:
        p = tuple(p)
        return all(self.colors[p[x]] == self.colors[x] for x in range(self.n)) and is_automorphism(self.base, p)

    def report(self) -> str:
        lines = [f"order {self.order}", f"generators {len(self.generators)}"]
        lines.extend(format_perm(g) for g in self.generators)
        return "\n".join(lines)


def _chain(s: Structure, colors: Sequence | None = None, base: Sequence[int] | None = None,
           first_only: bool = False):
    """Stabilizer chain of the coloured structure; see :class:`Group`.

    With ``first_only`` the search stops at the first non-identity element
    and returns it (or None when the group is trivial).
    """
    n = s.n
    colors = normalize(colors) if colors is not None else (0,) * n
    srch = _Searcher(s)
    cur = srch.refine_one(colors)
    idp = identity(n)
    levels = []
    depth = 0
    while True:
        if base is not None:
            if depth == len(base):
                break
            b = base[depth]
        else:
            cell = _target_cell(cur)
            if cell is None:
                break
            b = cell[0]
        depth += 1
        trans: dict[int, Perm] = {b: idp}
        gens: list[Perm] = []
        candidates = [y for y in range(n) if cur[y] == cur[b] and y != b]
        left_start = _individualize(cur, b)
        left = srch.refine_one(left_start)
        for y in candidates:
            if y in trans:
                continue
            res = srch.refine(left_start, _individualize(cur, y))
            if res is None:
                continue
            p = srch.search(*res)
            if p is None:
                continue
            if first_only:
                return p
            gens.append(p)
            # orbit closure of b under the level generators found so far
            frontier = list(trans.items())
            while frontier:
                nxt = []
                for z, t in frontier:
                    for g in gens:
                        w = g[z]
                        if w not in trans:
                            trans[w] = compose(g, t)
                            nxt.append((w, trans[w]))
                frontier = nxt
        levels.append((b, trans))
        cur = left
    if first_only:
        return None
    return colors, levels


def automorphisms(s: Structure, colors: Sequence | None = None, base: Sequence[int] | None = None) -> Group:
    """Automorphism group of ``s`` (optionally of ``s`` with a vertex colouring)."""
    colors, levels = _chain(s, colors, base)
    return Group(s, colors, levels)


def nontrivial_automorphism(s: Structure, colors: Sequence | None = None) -> Perm | None:
    """Some non-identity colour-preserving automorphism, or None if there is none."""
    return _chain(s, colors, first_only=True)


def _restrict(g: Group, extra: Sequence) -> Group:
    colors = normalize(list(zip(g.colors, extra)))
    return automorphisms(g.base, colors)


def setwise_stabilizer(g: Group, f: Iterable[int]) -> Group:
    f = set(f)
    _check_subset(g.base, f)
    return _restrict(g, [x in f for x in range(g.n)])


def pointwise_stabilizer(g: Group, f: Iterable[int]) -> Group:
    f = set(f)
    _check_subset(g.base, f)
    return _restrict(g, [x if x in f else -1 for x in range(g.n)])


def partition_stabilizer(s: Structure, blocks: Sequence[int]) -> Group:
    """Automorphisms of ``s`` mapping every block of the partition onto itself."""
    if len(blocks) != s.n:
        raise StructureError(f"partition covers {len(blocks)} elements, domain has {s.n}")
    return automorphisms(s, blocks)


def orbits(g: Group, carrier: Iterable[int] | None = None) -> list[list[int]]:
    """Orbit partition of ``carrier`` (default: the whole domain), least element first."""
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in g.generators:
        for x, y in enumerate(p):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)
    carrier = range(g.n) if carrier is None else sorted(set(carrier))
    blocks: dict[int, list[int]] = {}
    for x in carrier:
        blocks.setdefault(find(x), []).append(x)
    return sorted(blocks.values())


def orbit_of(g: Group, x: int) -> list[int]:
    for block in orbits(g):
        if x in block:
            return block
    raise StructureError(f"element {x} out of range")


def extends_to_full(s: Structure, a0: Iterable[int], g0: Mapping[int, int]) -> tuple[bool, Perm | None]:
    """Whether the automorphism ``g0`` of the substructure on ``a0`` extends to ``s``."""
    a0 = sorted(set(a0))
    _check_subset(s, a0)
    if sorted(g0) != a0 or sorted(g0.values()) != a0:
        raise StructureError("g0 must be a permutation of a0")
    sub, table = induced(s, a0)
    back = {old: i for i, old in enumerate(table)}
    if not is_automorphism(sub, [back[g0[old]] for old in table]):
        raise StructureError("g0 is not an automorphism of the induced substructure")
    p = find_automorphism(s, [(x, g0[x]) for x in a0])
    return p is not None, p


def brute_force_automorphisms(s: Structure, colors: Sequence | None = None) -> list[Perm]:
    """All colour-preserving automorphisms by testing every bijection (small ``n`` only)."""
    colors = tuple(colors) if colors is not None else (0,) * s.n
    out = []
    for p in itertools.permutations(range(s.n)):
        if all(colors[p[x]] == colors[x] for x in range(s.n)) and is_automorphism(s, p):
            out.append(p)
    return out


def closure(gens: Iterable[Perm], n: int, cap: int = ELEMENT_CAP) -> set[Perm]:
    """Group generated by ``gens`` by breadth-first multiplication."""
    gens = list(gens)
    seen = {identity(n)}
    frontier = [identity(n)]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = compose(g, p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
                    if len(seen) > cap:
                        raise CapacityError(f"closure exceeds {cap} elements")
        frontier = nxt
    return seen


def _check_subset(s: Structure, f):
    for x in f:
        if not 0 <= x < s.n:
            raise StructureError(f"element {x} out of range 0..{s.n - 1}")


def find_automorphism(s: Structure, pairs: Iterable[tuple[int, int]], colors: Sequence | None = None) -> Perm | None:
    """Least-image-first automorphism sending each ``x`` to ``y`` for the given pairs."""
    colors = normalize(colors) if colors is not None else (0,) * s.n
    srch = _Searcher(s)
    start = srch.refine_one(colors)
    res = srch.pin(start, start, list(pairs))
    if res is None:
        return None
    return srch.search(*res)
