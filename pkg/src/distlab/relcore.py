"""Finite relational structures on the domain ``0..n-1``.

A :class:`Structure` is an immutable value: a signature, a domain size and
one tuple set per relation.  Undirected graphs store both orientations of
every edge; a directed edge ``(u, v)`` means ``u`` dominates ``v``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence


class StructureError(ValueError):
    """Raised for malformed structures or invalid construction inputs."""


@dataclass(frozen=True)
class Signature:
    relations: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if not self.relations:
            raise StructureError("signature must contain at least one relation")
        names = [name for name, _ in self.relations]
        if len(set(names)) != len(names):
            raise StructureError(f"duplicate relation names in {names}")
        for name, arity in self.relations:
            if not name.isidentifier():
                raise StructureError(f"bad relation name {name!r}")
            if arity < 1:
                raise StructureError(f"relation {name} has arity {arity}")

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> Signature:
        return cls(tuple(pairs))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.relations)

    @property
    def arities(self) -> tuple[int, ...]:
        return tuple(arity for _, arity in self.relations)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def __str__(self):
        return " ".join(f"{name}:{arity}" for name, arity in self.relations)


GRAPH = Signature.of(("E", 2))
HYPER3 = Signature.of(("H", 3))
BIORDER = Signature.of(("L", 2), ("P", 2))


@dataclass(frozen=True)
class Structure:
    sig: Signature
    n: int
    rels: tuple[frozenset, ...]
    meta: Mapping = field(default_factory=dict, compare=False, hash=False, repr=False)
    name: str = field(default="", compare=False, hash=False)

    def __post_init__(self):
        if self.n < 0:
            raise StructureError("negative domain size")
        if len(self.rels) != len(self.sig.relations):
            raise StructureError("one tuple set per relation required")
        rels = tuple(frozenset(tuple(t) for t in r) for r in self.rels)
        object.__setattr__(self, "rels", rels)
        for (rname, arity), tuples in zip(self.sig.relations, rels):
            for t in tuples:
                if len(t) != arity:
                    raise StructureError(f"tuple {t} in {rname} has length {len(t)} != {arity}")
                for x in t:
                    if not 0 <= x < self.n:
                        raise StructureError(f"tuple {t} in {rname} leaves domain 0..{self.n - 1}")

    def __len__(self):
        return self.n

    def rel(self, name: str) -> frozenset:
        return self.rels[self.sig.index(name)]

    def holds(self, name: str, *args: int) -> bool:
        return tuple(args) in self.rel(name)

    def with_meta(self, **meta) -> Structure:
        merged = dict(self.meta)
        merged.update(meta)
        return Structure(self.sig, self.n, self.rels, merged, self.name)

    def named(self, name: str) -> Structure:
        return Structure(self.sig, self.n, self.rels, dict(self.meta), name)

    def is_binary(self) -> bool:
        return all(a == 2 for a in self.sig.arities)

    def has_loops(self) -> bool:
        return any(len(set(t)) < len(t) for r in self.rels for t in r)

    def incidence(self) -> list[list[tuple[int, int, tuple[int, ...]]]]:
        """Per element, the ``(relation index, position, tuple)`` triples it occurs in."""
        inc: list[list[tuple[int, int, tuple[int, ...]]]] = [[] for _ in range(self.n)]
        for ri, tuples in enumerate(self.rels):
            for t in sorted(tuples):
                for pos, x in enumerate(t):
                    inc[x].append((ri, pos, t))
        return inc


# -- builders ---------------------------------------------------------------

def graph(n: int, edges: Iterable[tuple[int, int]], name: str = "") -> Structure:
    """Undirected graph; each edge is stored in both orientations."""
    tuples = set()
    for u, v in edges:
        if u == v:
            raise StructureError(f"loop at {u}")
        tuples.add((u, v))
        tuples.add((v, u))
    return Structure(GRAPH, n, (frozenset(tuples),), name=name)


def digraph(n: int, arcs: Iterable[tuple[int, int]], name: str = "") -> Structure:
    arcs = set(arcs)
    for u, v in arcs:
        if u == v:
            raise StructureError(f"loop at {u}")
    return Structure(GRAPH, n, (frozenset(arcs),), name=name)


def edges(s: Structure) -> list[tuple[int, int]]:
    """Undirected edge list ``u < v`` of a symmetric binary structure."""
    return sorted((u, v) for u, v in s.rels[0] if u < v)


def neighbors(s: Structure, v: int) -> set[int]:
    """Elements adjacent to ``v`` through any relation."""
    out = set()
    for tuples in s.rels:
        for t in tuples:
            if v in t:
                out.update(t)
    out.discard(v)
    return out


def cycle(n: int) -> Structure:
    return graph(n, [(i, (i + 1) % n) for i in range(n)], name=f"C_{n}")


def dicycle(n: int) -> Structure:
    return digraph(n, [(i, (i + 1) % n) for i in range(n)], name=f"dicycle_{n}")


def path(n: int) -> Structure:
    return graph(n, [(i, i + 1) for i in range(n - 1)], name=f"P_{n}")


def complete(n: int) -> Structure:
    return graph(n, itertools.combinations(range(n), 2), name=f"K_{n}")


def empty(n: int) -> Structure:
    return graph(n, [], name=f"I_{n}")


def empty_digraph(n: int) -> Structure:
    return digraph(n, [], name=f"I_{n}")


def mkn(m: int, n: int) -> Structure:
    """``m`` disjoint copies of ``K_n``."""
    es = [(c * n + i, c * n + j) for c in range(m) for i, j in itertools.combinations(range(n), 2)]
    return graph(m * n, es, name=f"{m}K_{n}").with_meta(copy=[v // n for v in range(m * n)])


def line_graph_k33() -> Structure:
    """``L(K_{3,3})``; vertex ``3*i + j`` is the edge between ``i`` of one side and ``j`` of the other."""
    es = []
    for u, v in itertools.combinations(range(9), 2):
        (i1, j1), (i2, j2) = divmod(u, 3), divmod(v, 3)
        if i1 == i2 or j1 == j2:
            es.append((u, v))
    return graph(9, es, name="L(K_3,3)")


def linear_order(n: int) -> Structure:
    return digraph(n, itertools.combinations(range(n), 2), name=f"L_{n}")


# -- substructures and maps -------------------------------------------------

def induced(s: Structure, subset: Iterable[int]) -> tuple[Structure, list[int]]:
    """Substructure on ``subset`` renumbered in ascending order.

    Returns the structure and the table ``new -> old``.
    """
    keep = sorted(set(subset))
    for x in keep:
        if not 0 <= x < s.n:
            raise StructureError(f"element {x} out of range 0..{s.n - 1}")
    new = {old: i for i, old in enumerate(keep)}
    rels = tuple(
        frozenset(tuple(new[x] for x in t) for t in tuples if all(x in new for x in t))
        for tuples in s.rels
    )
    return Structure(s.sig, len(keep), rels), keep


def relabel(s: Structure, perm: Sequence[int]) -> Structure:
    """Image of ``s`` under the bijection ``x -> perm[x]``."""
    if sorted(perm) != list(range(s.n)):
        raise StructureError("relabel needs a permutation of the domain")
    rels = tuple(frozenset(tuple(perm[x] for x in t) for t in tuples) for tuples in s.rels)
    return Structure(s.sig, s.n, rels)


def _check_same_signature(a: Structure, b: Structure):
    if a.sig != b.sig:
        raise StructureError(f"signature mismatch: {a.sig} vs {b.sig}")


def _iter_embeddings(small: Structure, big: Structure, fixed: Mapping[int, int] | None = None,
                     surjective: bool = False) -> Iterator[dict[int, int]]:
    """Backtracking over injective maps in lexicographic order of image lists."""
    _check_same_signature(small, big)
    if small.n > big.n or (surjective and small.n != big.n):
        return
    inc = small.incidence()
    big_rels = big.rels
    fixed = dict(fixed or {})
    f: dict[int, int] = {}
    used = set()

    def consistent(x: int) -> bool:
        # every small tuple whose elements are mapped must hold in big
        for ri, _pos, t in inc[x]:
            if all(y in f for y in t) and tuple(f[y] for y in t) not in big_rels[ri]:
                return False
        # reflect: big tuples among the image must come from small tuples
        image = {v: k for k, v in f.items()}
        fx = f[x]
        for ri, tuples in enumerate(big.rels):
            arity = big.sig.arities[ri]
            if arity > len(f):
                continue
            for t in _tuples_through(big, ri, fx):
                if all(y in image for y in t):
                    if tuple(image[y] for y in t) not in small.rels[ri]:
                        return False
        return True

    big_through = {}

    def _tuples_through(b: Structure, ri: int, v: int):
        key = (ri, v)
        if key not in big_through:
            big_through[key] = [t for t in b.rels[ri] if v in t]
        return big_through[key]

    def extend(x: int):
        if x == small.n:
            yield dict(f)
            return
        candidates = [fixed[x]] if x in fixed else range(big.n)
        for y in candidates:
            if y in used:
                continue
            f[x] = y
            used.add(y)
            if consistent(x):
                yield from extend(x + 1)
            del f[x]
            used.discard(y)

    yield from extend(0)


def embeddings(small: Structure, big: Structure, limit: int | None = None) -> list[dict[int, int]]:
    """All embeddings of ``small`` into ``big`` (up to ``limit``), lexicographic by image list."""
    out = []
    for f in _iter_embeddings(small, big):
        out.append(f)
        if limit is not None and len(out) >= limit:
            break
    return out


def is_isomorphic(a: Structure, b: Structure) -> tuple[bool, dict[int, int] | None]:
    if a.sig != b.sig or a.n != b.n:
        return False, None
    if tuple(len(r) for r in a.rels) != tuple(len(r) for r in b.rels):
        return False, None
    from distlab.autgroup import find_isomorphism

    witness = find_isomorphism(a, b)
    return witness is not None, witness


def is_embedding(f: Mapping[int, int], small: Structure, big: Structure) -> bool:
    """Direct check that ``f`` is injective and preserves and reflects every relation."""
    if len(set(f.values())) != len(f) or set(f) != set(range(small.n)):
        return False
    for ri, arity in enumerate(small.sig.arities):
        for t in itertools.product(range(small.n), repeat=arity):
            if (t in small.rels[ri]) != (tuple(f[x] for x in t) in big.rels[ri]):
                return False
    return True


def adjacent(s: Structure, a: int, b: int) -> bool:
    if a == b:
        raise StructureError("adjacency is defined for distinct elements")
    for x in (a, b):
        if not 0 <= x < s.n:
            raise StructureError(f"element {x} out of range")
    return any(a in t and b in t for tuples in s.rels for t in tuples)


def is_complete(s: Structure) -> bool:
    pairs = set()
    for tuples in s.rels:
        for t in tuples:
            for x, y in itertools.combinations(set(t), 2):
                pairs.add((min(x, y), max(x, y)))
    return len(pairs) == s.n * (s.n - 1) // 2


def free_amalgam(b0: Structure, b1: Structure, glue: Mapping[int, int]) -> tuple[Structure, list[int]]:
    """Free amalgam of ``b0`` and ``b1`` over ``glue`` (elements of b0 -> elements of b1).

    Elements of ``b0`` keep their numbers; private elements of ``b1`` follow in
    ascending order.  Returns the amalgam and the table placing ``b1`` inside it.
    """
    _check_same_signature(b0, b1)
    glue = dict(glue)
    if len(set(glue.values())) != len(glue):
        raise StructureError("glue is not injective")
    keys = sorted(glue)
    images = [glue[x] for x in keys]
    for ri, arity in enumerate(b0.sig.arities):
        for t in itertools.product(range(len(keys)), repeat=arity):
            in0 = tuple(keys[i] for i in t) in b0.rels[ri]
            in1 = tuple(images[i] for i in t) in b1.rels[ri]
            if in0 != in1:
                raise StructureError("glue is not a local isomorphism")
    inverse = {v: k for k, v in glue.items()}
    private = [y for y in range(b1.n) if y not in inverse]
    place = []
    for y in range(b1.n):
        place.append(inverse[y] if y in inverse else b0.n + private.index(y))
    rels = []
    for ri in range(len(b0.rels)):
        tuples = set(b0.rels[ri])
        tuples.update(tuple(place[y] for y in t) for t in b1.rels[ri])
        rels.append(frozenset(tuples))
    return Structure(b0.sig, b0.n + len(private), tuple(rels)), place


def complement(s: Structure) -> Structure:
    if not s.is_binary():
        raise StructureError("complement needs an all-binary signature")
    if s.has_loops():
        raise StructureError("complement needs an irreflexive structure")
    pairs = [(a, b) for a in range(s.n) for b in range(s.n) if a != b]
    rels = tuple(frozenset(p for p in pairs if p not in r) for r in s.rels)
    return Structure(s.sig, s.n, rels, name=f"co-{s.name}" if s.name else "")


def wreath(outer: Structure, inner: Structure) -> Structure:
    """``outer[inner]``: every element of ``outer`` blown up into a copy of ``inner``.

    Element ``(u, i)`` is numbered ``u * inner.n + i``.
    """
    _check_same_signature(outer, inner)
    if not outer.is_binary():
        raise StructureError("wreath needs binary signatures")
    m = inner.n
    rels = []
    for ri in range(len(outer.rels)):
        tuples = set()
        for u in range(outer.n):
            for a, b in inner.rels[ri]:
                tuples.add((u * m + a, u * m + b))
        for u, v in outer.rels[ri]:
            for i in range(m):
                for j in range(m):
                    tuples.add((u * m + i, v * m + j))
        rels.append(frozenset(tuples))
    name = f"{outer.name}[{inner.name}]" if outer.name and inner.name else ""
    return Structure(outer.sig, outer.n * m, tuple(rels), name=name).with_meta(
        block=[x // m for x in range(outer.n * m)])


def is_tournament(t: Structure) -> bool:
    if not t.is_binary() or len(t.rels) != 1 or t.has_loops():
        return False
    arcs = t.rels[0]
    for a, b in itertools.combinations(range(t.n), 2):
        if ((a, b) in arcs) == ((b, a) in arcs):
            return False
    return True


def hat(t: Structure) -> Structure:
    """Two apex-extended copies of a tournament with reversed cross edges.

    Copy ``c`` (0 or 1) of tournament element ``u`` is ``c * (n + 1) + u``; the
    apexes are ``n`` and ``2n + 1``.
    """
    if not is_tournament(t):
        raise StructureError("hat needs a tournament")
    n = t.n
    apex = n
    plus = set(t.rels[0]) | {(apex, u) for u in range(n)}
    size = n + 1
    arcs = set()
    for c in (0, 1):
        arcs.update((c * size + a, c * size + b) for a, b in plus)
    for u in range(size):
        for v in range(size):
            # edge from u in copy 0 to v in copy 1 iff v -> u in H+, and symmetrically
            if (v, u) in plus:
                arcs.add((u, size + v))
                arcs.add((size + u, v))
    name = f"hat({t.name})" if t.name else ""
    return digraph(2 * size, arcs, name=name).with_meta(
        copy=[x // size for x in range(2 * size)], apex=[apex, size + apex])


# -- text format ------------------------------------------------------------

def serialize(s: Structure, name: str | None = None) -> str:
    lines = [f"structure {name or s.name or 'unnamed'}", f"signature {s.sig}", f"domain {s.n}"]
    for (rname, _), tuples in zip(s.sig.relations, s.rels):
        lines.append(f"rel {rname}")
        lines.extend(" ".join(map(str, t)) for t in sorted(tuples))
    lines.append("end")
    return "\n".join(lines) + "\n"


class ParseError(StructureError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def parse(text: str, allow_loops: bool = False) -> Structure:
    """Parse the line-oriented structure format produced by :func:`serialize`."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, raw, line))
    if len(rows) < 4:
        raise ParseError("truncated structure", rows[-1][0] if rows else 1)

    def expect(i: int, keyword: str) -> list[str]:
        lineno, raw, line = rows[i]
        parts = line.split()
        if parts[0] != keyword:
            raise ParseError(f"expected {keyword!r}, got {parts[0]!r}", lineno, raw.find(parts[0]) + 1)
        return parts[1:]

    name_parts = expect(0, "structure")
    name = " ".join(name_parts)
    sig_parts = expect(1, "signature")
    pairs = []
    for tok in sig_parts:
        rname, _, ar = tok.partition(":")
        if not ar.isdigit():
            raise ParseError(f"bad relation declaration {tok!r}", rows[1][0], rows[1][1].find(tok) + 1)
        pairs.append((rname, int(ar)))
    try:
        sig = Signature(tuple(pairs))
    except StructureError as exc:
        raise ParseError(str(exc), rows[1][0]) from exc
    dom = expect(2, "domain")
    if len(dom) != 1 or not dom[0].isdigit():
        raise ParseError("domain needs one non-negative integer", rows[2][0])
    n = int(dom[0])
    tuples: dict[str, set] = {rname: set() for rname in sig.names}
    current = None
    ended = False
    for lineno, raw, line in rows[3:]:
        if ended:
            raise ParseError("content after 'end'", lineno)
        parts = line.split()
        if parts[0] == "rel":
            if len(parts) != 2 or parts[1] not in tuples:
                raise ParseError(f"unknown relation in {line!r}", lineno, raw.find("rel") + 1)
            current = parts[1]
        elif parts[0] == "end":
            ended = True
        else:
            if current is None:
                raise ParseError("tuple before any 'rel' line", lineno)
            try:
                t = tuple(int(p) for p in parts)
            except ValueError:
                bad = next(p for p in parts if not p.lstrip("-").isdigit())
                raise ParseError(f"non-integer entry {bad!r}", lineno, raw.find(bad) + 1) from None
            arity = sig.arities[sig.index(current)]
            if len(t) != arity:
                raise ParseError(f"tuple of length {len(t)} in relation of arity {arity}", lineno)
            for p, x in zip(parts, t):
                if not 0 <= x < n:
                    raise ParseError(f"entry {x} outside domain 0..{n - 1}", lineno, raw.find(p) + 1)
            if not allow_loops and len(set(t)) < len(t):
                raise ParseError(f"tuple {t} repeats an element", lineno)
            tuples[current].add(t)
    if not ended:
        raise ParseError("missing 'end'", rows[-1][0])
    return Structure(sig, n, tuple(frozenset(tuples[r]) for r in sig.names), name=name)
