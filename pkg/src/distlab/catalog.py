"""Generators for the structure families, and the extension-property oracle.

Finite stages of the countable homogeneous structures are certified by
:func:`extension_report`: for every base set ``B`` of at most ``t`` elements
and every one-point extension type over ``B`` allowed by the family's age,
some element outside ``B`` must realise it.

Stages whose limit has a transitive automorphism group (random graph,
``K_n``-free graphs, random tournament, ``D_n``, the 3-hypergraph) are built
as Cayley objects over a cyclic or affine group, so the stage group is
itself transitive.  Posets cannot be transitive at finite scale and are
grown greedily instead, closing transitively after each new element.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass, field
from typing import Callable

from distlab import relcore as rc
from distlab.relcore import GRAPH, HYPER3, BIORDER, Signature, Structure, StructureError

Admissible = Callable[[Structure], bool]


class UnknownFamily(StructureError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    family: str
    params: tuple = ()
    seed: int = 0
    level: int = 2
    cap: int = 40

    def __post_init__(self):
        if self.level < 0:
            raise StructureError("level must be non-negative")
        if self.cap < 1:
            raise StructureError("cap must be positive")
        if self.family not in FAMILIES:
            raise UnknownFamily(f"unknown family {self.family!r}; known: {', '.join(sorted(FAMILIES))}")
        want = FAMILIES[self.family][0]
        if len(self.params) != want:
            raise StructureError(f"family {self.family} takes {want} parameter(s), got {len(self.params)}")


@dataclass
class StageCertificate:
    requested: int
    level_achieved: int
    missing: list[tuple[tuple[int, ...], str]] = field(default_factory=list)
    constraints_ok: bool = True

    @property
    def ok(self) -> bool:
        return self.constraints_ok and self.level_achieved >= self.requested

    def summary(self) -> str:
        return f"level={self.level_achieved} missing={len(self.missing)}"


# -- age predicates ---------------------------------------------------------

def _arcs(s: Structure) -> frozenset:
    return s.rels[0]


def is_graph(s: Structure) -> bool:
    e = _arcs(s)
    return all(u != v and (v, u) in e for u, v in e)


def is_oriented(s: Structure) -> bool:
    e = _arcs(s)
    return all(u != v and (v, u) not in e for u, v in e)


def is_tournament(s: Structure) -> bool:
    return rc.is_tournament(s)


def _max_clique_at_least(adj: list[set[int]], k: int) -> bool:
    def grow(clique_size: int, cands: set[int]) -> bool:
        if clique_size >= k:
            return True
        if clique_size + len(cands) < k:
            return False
        for v in sorted(cands):
            if grow(clique_size + 1, cands & adj[v]):
                return True
            cands = cands - {v}
        return False

    return grow(0, set(range(len(adj))))


def _adjacency(s: Structure) -> list[set[int]]:
    adj = [set() for _ in range(s.n)]
    for u, v in _arcs(s):
        adj[u].add(v)
        adj[v].add(u)
    return adj


def kn_free(k: int) -> Admissible:
    def check(s: Structure) -> bool:
        return is_graph(s) and not _max_clique_at_least(_adjacency(s), k)
    check.__name__ = f"K{k}_free"
    return check


def no_independent(k: int) -> Admissible:
    def check(s: Structure) -> bool:
        if not is_oriented(s):
            return False
        adj = _adjacency(s)
        non = [set(range(s.n)) - adj[v] - {v} for v in range(s.n)]
        return not _max_clique_at_least(non, k)
    check.__name__ = f"I{k}_free"
    return check


def is_hyper3(s: Structure) -> bool:
    h = s.rels[0]
    return all(len(set(t)) == 3 and all(p in h for p in itertools.permutations(t)) for t in h)


def is_strict_order(pairs: frozenset, n: int) -> bool:
    for a, b in pairs:
        if a == b or (b, a) in pairs:
            return False
    succ: dict[int, set[int]] = {}
    for a, b in pairs:
        succ.setdefault(a, set()).add(b)
    for a, bs in succ.items():
        for b in bs:
            for c in succ.get(b, ()):
                if (a, c) not in pairs:
                    return False
    return True


def is_poset(s: Structure) -> bool:
    return is_strict_order(s.rels[0], s.n)


def is_linear(pairs: frozenset, n: int) -> bool:
    return is_strict_order(pairs, n) and len(pairs) == n * (n - 1) // 2


def is_biorder(s: Structure) -> bool:
    return all(is_linear(r, s.n) for r in s.rels)


def perp_classes(s: Structure) -> list[int] | None:
    """Class index per element when non-adjacency is an equivalence relation, else None."""
    adj = _adjacency(s)
    cls = [-1] * s.n
    reps: list[int] = []
    for v in range(s.n):
        for ci, r in enumerate(reps):
            if r not in adj[v]:
                cls[v] = ci
                break
        else:
            cls[v] = len(reps)
            reps.append(v)
    for u, v in itertools.combinations(range(s.n), 2):
        if (cls[u] == cls[v]) == (v in adj[u]):
            return None
    return cls


def perp_equivalence(n_classes: int) -> Admissible:
    def check(s: Structure) -> bool:
        if not is_oriented(s):
            return False
        cls = perp_classes(s)
        return cls is not None and len(set(cls)) <= n_classes
    check.__name__ = f"perp{n_classes}"
    return check


def parity_ok(s: Structure, cls: list[int]) -> bool:
    """Every two-by-two pair of pairs from distinct classes has an even number of arcs between them."""
    e = _arcs(s)
    by_class: dict[int, list[int]] = {}
    for v, c in enumerate(cls):
        by_class.setdefault(c, []).append(v)
    for ci, cj in itertools.combinations(sorted(by_class), 2):
        for a1, a2 in itertools.combinations(by_class[ci], 2):
            for b1, b2 in itertools.combinations(by_class[cj], 2):
                count = sum((a, b) in e for a in (a1, a2) for b in (b1, b2))
                if count % 2:
                    return False
    return True


def semigeneric_age(n_classes: int) -> Admissible:
    base = perp_equivalence(n_classes)

    def check(s: Structure) -> bool:
        return base(s) and parity_ok(s, perp_classes(s))
    check.__name__ = f"semigeneric{n_classes}"
    return check


def is_classed_poset(s: Structure) -> bool:
    """Poset in relation 0 plus unary class predicates, exactly one per element."""
    if not is_strict_order(s.rels[0], s.n):
        return False
    counts = [0] * s.n
    for r in s.rels[1:]:
        for (x,) in r:
            counts[x] += 1
    return all(c == 1 for c in counts)


# -- extension property -----------------------------------------------------

def _extension_structure(s: Structure, base: tuple[int, ...], tuples: frozenset) -> Structure:
    sub, _ = rc.induced(s, base)
    pos = {b: i for i, b in enumerate(sorted(base))}
    x = len(base)
    rels = [set(r) for r in sub.rels]
    for ri, pattern in tuples:
        rels[ri].add(tuple(x if p < 0 else pos[base[p]] for p in pattern))
    return Structure(s.sig, x + 1, tuple(frozenset(r) for r in rels))


def _patterns(sig: Signature, k: int) -> list[tuple[int, tuple[int, ...]]]:
    """Irreflexive tuple shapes over ``k`` base positions plus the new point ``-1``."""
    out = []
    for ri, arity in enumerate(sig.arities):
        for t in itertools.permutations([-1] + list(range(k)), arity):
            if -1 in t:
                out.append((ri, t))
    return out


def _type_of(s: Structure, inc, base: tuple[int, ...], z: int) -> frozenset:
    where = {b: i for i, b in enumerate(base)}
    out = []
    for ri, t in inc[z]:
        if all(y == z or y in where for y in t):
            out.append((ri, tuple(-1 if y == z else where[y] for y in t)))
    return frozenset(out)


def _describe(sig: Signature, tuples) -> str:
    parts = []
    for ri, pattern in sorted(tuples):
        args = ",".join("x" if p < 0 else f"b{p}" for p in pattern)
        parts.append(f"{sig.names[ri]}({args})")
    return "{" + " ".join(parts) + "}"


def extension_report(s: Structure, admissible: Admissible, t: int,
                     anchors: list[int] | None = None, stop_after: int | None = None) -> StageCertificate:
    """Exhaustive one-point extension check over all bases of size ``<= t``.

    With ``anchors`` only bases containing an anchor are examined (sound when
    the automorphism group is transitive and the anchors cover one orbit).
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    inc: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in range(s.n)]
    for ri, tuples in enumerate(s.rels):
        for tup in tuples:
            for y in set(tup):
                inc[y].append((ri, tup))
    consistent_cache: dict = {}
    pattern_cache: dict[int, list] = {}
    missing: list[tuple[tuple[int, ...], str]] = []
    first_bad = None
    for size in range(t + 1):
        if size > s.n:
            break
        pats = pattern_cache.setdefault(size, _patterns(s.sig, size))
        for base in itertools.combinations(range(s.n), size):
            if anchors is not None and size and not any(a in base for a in anchors):
                continue
            realized = {_type_of(s, inc, base, z) for z in range(s.n) if z not in base}
            sub, _ = rc.induced(s, base)
            key_base = sub.rels
            for r in range(len(pats) + 1):
                for chosen in itertools.combinations(pats, r):
                    tp = frozenset(chosen)
                    if tp in realized:
                        continue
                    key = (key_base, tp)
                    if key not in consistent_cache:
                        consistent_cache[key] = admissible(_extension_structure(s, base, tp))
                    if consistent_cache[key]:
                        missing.append((base, _describe(s.sig, tp)))
                        if first_bad is None:
                            first_bad = size
                        if stop_after is not None and len(missing) >= stop_after:
                            return StageCertificate(t, first_bad - 1, missing, admissible(s))
    level = t if first_bad is None else first_bad - 1
    return StageCertificate(t, level, missing, admissible(s))


def realizing_elements(s: Structure, base: tuple[int, ...], tuples: frozenset) -> list[int]:
    inc: list[list] = [[] for _ in range(s.n)]
    for ri, ts in enumerate(s.rels):
        for tup in ts:
            for y in set(tup):
                inc[y].append((ri, tup))
    return [z for z in range(s.n) if z not in base and _type_of(s, inc, base, z) == frozenset(tuples)]


# -- transitive stages ------------------------------------------------------

ATTEMPTS = 64


def _rng(*key) -> random.Random:
    return random.Random(":".join(map(str, key)))


def _circulant(n: int, arcs_from_zero: set[int]) -> set[tuple[int, int]]:
    return {(x, (x + d) % n) for x in range(n) for d in arcs_from_zero}


def _transitive_stage(name: str, spec: FamilySpec, sizes, build, admissible: Admissible,
                      anchors=(0,)) -> tuple[Structure, StageCertificate]:
    """First seeded Cayley candidate, over the given orders, reaching the requested level."""
    best = None
    for n in sizes:
        for attempt in range(ATTEMPTS):
            s = build(n, _rng(name, spec.seed, n, attempt))
            if s is None or not admissible(s):
                continue
            quick = extension_report(s, admissible, spec.level, anchors=list(anchors), stop_after=1)
            if quick.level_achieved >= spec.level:
                return s, extension_report(s, admissible, spec.level)
            if best is None or quick.level_achieved > best[1].level_achieved:
                best = (s, quick)
    if best is None:
        raise StructureError(f"no admissible {name} stage within cap {spec.cap}")
    s = best[0]
    return s, extension_report(s, admissible, spec.level)


def _symmetric_circulant(n: int, rnd: random.Random, ok: Admissible | None = None) -> Structure:
    """Circulant graph with a random symmetric connection set grown greedily while ``ok`` holds."""
    diffs = list(range(1, n // 2 + 1))
    rnd.shuffle(diffs)
    conn: set[int] = set()
    for d in diffs:
        trial = conn | {d, (n - d) % n}
        if ok is None:
            if rnd.random() < 0.5:
                conn = trial
            continue
        if ok(rc.graph(n, _circulant(n, trial))):
            conn = trial
    return rc.graph(n, _circulant(n, conn))


def _sparse_circulant(n: int, rnd: random.Random, t: int) -> Structure | None:
    """Smallest random symmetric connection set, grown pairwise, with level ``t`` extension."""
    diffs = list(range(1, (n + 1) // 2))
    rnd.shuffle(diffs)
    conn: set[int] = set()
    for d in diffs:
        conn |= {d, n - d}
        s = rc.graph(n, _circulant(n, conn))
        if len(conn) >= 4 and extension_report(s, is_graph, t, anchors=[0], stop_after=1).level_achieved >= t:
            return s
    return None


def _circulant_tournament(n: int, rnd: random.Random) -> Structure | None:
    if n % 2 == 0:
        return None
    conn = {d if rnd.random() < 0.5 else n - d for d in range(1, (n - 1) // 2 + 1)}
    return rc.digraph(n, _circulant(n, conn))


def _circulant_dn(k: int):
    """Oriented circulant whose non-adjacency graph is a maximal ``K_k``-free circulant."""
    ok = no_independent(k)

    def build(n: int, rnd: random.Random) -> Structure | None:
        if n % 2 == 0:
            return None
        loose = _symmetric_circulant(n, rnd, kn_free(k))
        gaps = {d for _, d in loose.rels[0] if _ == 0}
        conn = {d if rnd.random() < 0.5 else n - d for d in range(1, (n - 1) // 2 + 1) if d not in gaps}
        s = rc.digraph(n, _circulant(n, conn))
        return s if ok(s) else None

    return build


def _prime_at_most(n: int) -> int:
    for p in range(n, 1, -1):
        if all(p % q for q in range(2, int(p ** 0.5) + 1)):
            return p
    raise StructureError("no prime below cap")


def _affine_label(p: int, a: int, b: int, c: int) -> int:
    """Invariant of a 3-subset of Z_p under the affine group x -> ux + v."""
    inv = pow((b - a) % p, p - 2, p)
    r = (c - a) * inv % p
    vals = set()
    for x in (r, (1 - r) % p):
        vals.add(x)
        vals.add(pow(x, p - 2, p))
    for x in list(vals):
        vals.add((1 - x) % p)
        vals.add(pow(x, p - 2, p) if x else 0)
    return min(vals)


def _affine_hypergraph(p: int, rnd: random.Random) -> Structure | None:
    labels = sorted({_affine_label(p, 0, 1, c) for c in range(2, p)})
    chosen = {lab for lab in labels if rnd.random() < 0.5}
    if not chosen or len(chosen) == len(labels):
        return None
    tuples = set()
    for a, b, c in itertools.combinations(range(p), 3):
        if _affine_label(p, a, b, c) in chosen:
            tuples.update(itertools.permutations((a, b, c)))
    s = Structure(HYPER3, p, (frozenset(tuples),))
    return s if joint_witnesses(s) else None


def joint_witnesses(s: Structure) -> list[int]:
    """Points forming a hyperedge with every pair of the least hyperedge."""
    edges = {frozenset(e) for e in s.rels[0]}
    if not edges:
        return []
    f = min(tuple(sorted(e)) for e in edges)
    return [x for x in range(s.n) if x not in f
            and all(frozenset(pair) | {x} in edges for pair in itertools.combinations(f, 2))]


# -- greedy poset stages ----------------------------------------------------

def _closure(pairs: set[tuple[int, int]]) -> set[tuple[int, int]]:
    pairs = set(pairs)
    changed = True
    while changed:
        succ: dict[int, set[int]] = {}
        for a, b in pairs:
            succ.setdefault(a, set()).add(b)
        new = {(a, c) for a, bs in succ.items() for b in bs for c in succ.get(b, ()) if (a, c) not in pairs}
        changed = bool(new)
        pairs |= new
    return pairs


def _add_poset_point(less: set, n: int, below: set[int], above: set[int], incomparable: set[int],
                     rnd: random.Random) -> set | None:
    """Add element ``n`` with prescribed relations to a base; others are filled at random."""
    x = n
    fixed = {(b, x) for b in below} | {(x, a) for a in above}
    trial = _closure(less | fixed)
    if any((x, b) in trial or (b, x) in trial for b in incomparable):
        return None
    if any((a, b) in trial and (b, a) in trial for a, b in trial):
        return None
    if any(p not in less for p in trial if x not in p):
        return None
    others = [z for z in range(n) if z not in below | above | incomparable]
    rnd.shuffle(others)
    for z in others:
        if (z, x) in trial or (x, z) in trial:
            continue
        roll = rnd.random()
        if roll < 1 / 3:
            continue
        cand = (z, x) if roll < 2 / 3 else (x, z)
        grown = _closure(trial | {cand})
        if any(p not in less for p in grown if x not in p):
            continue
        if any((x, b) in grown or (b, x) in grown for b in incomparable):
            continue
        if any((a, b) in grown and (b, a) in grown for a, b in grown):
            continue
        trial = grown
    return trial


def _greedy_poset(spec: FamilySpec, classes: int = 0) -> tuple[Structure, StageCertificate, list[int]]:
    """Grow a poset (optionally with ``classes`` unary class predicates) until level ``t`` holds."""
    rnd = _rng("poset", classes, spec.seed)
    sig = Signature(((("L", 2),) + tuple((f"C{i}", 1) for i in range(classes)))) if classes else GRAPH
    admissible = is_classed_poset if classes else is_poset
    less: set[tuple[int, int]] = set()
    cls: list[int] = [0] if classes else []
    n = 1

    def build() -> Structure:
        rels = [frozenset(less)]
        for i in range(classes):
            rels.append(frozenset((x,) for x in range(n) if cls[x] == i))
        return Structure(sig, n, tuple(rels))

    s = build()
    while True:
        cert = extension_report(s, admissible, spec.level, stop_after=1)
        if not cert.missing or n >= spec.cap:
            break
        base, _ = cert.missing[0]
        tp = _first_missing_type(s, admissible, base)
        below = {base[p[0]] for ri, p in tp if ri == 0 and p[1] == -1}
        above = {base[p[1]] for ri, p in tp if ri == 0 and p[0] == -1}
        incomparable = set(base) - below - above
        grown = _add_poset_point(less, n, below, above, incomparable, rnd)
        if grown is None:
            raise StructureError(f"inconsistent extension over {base}")
        less = grown
        if classes:
            cls.append(next(ri - 1 for ri, p in tp if p == (-1,)))
        n += 1
        s = build()
    return s, extension_report(s, admissible, spec.level), cls


def _first_missing_type(s: Structure, admissible: Admissible, base: tuple[int, ...]) -> frozenset:
    inc: list[list] = [[] for _ in range(s.n)]
    for ri, ts in enumerate(s.rels):
        for tup in ts:
            for y in set(tup):
                inc[y].append((ri, tup))
    realized = {_type_of(s, inc, base, z) for z in range(s.n) if z not in base}
    pats = _patterns(s.sig, len(base))
    for r in range(len(pats) + 1):
        for chosen in itertools.combinations(pats, r):
            tp = frozenset(chosen)
            if tp not in realized and admissible(_extension_structure(s, base, tp)):
                return tp
    raise StructureError("no missing type")


# -- shifted and imprimitive families ---------------------------------------

def shift_classes(rel_value: Callable[[int, int], int], cls: list[int], n: int, modulus: int = 3) -> set:
    """Arcs of the structure obtained by shifting pair values ``0`` (none), ``1`` (x->y), ``2`` (y->x)
    by the class difference ``c(y) - c(x)``."""
    arcs = set()
    for x, y in itertools.permutations(range(n), 2):
        v = (rel_value(x, y) + cls[y] - cls[x]) % modulus
        if v == 1:
            arcs.add((x, y))
    return arcs


def qstar(m: int) -> Structure:
    """Linear order on ``2m`` points, classes interleaved, cross edges reversed."""
    n = 2 * m
    cls = [x % 2 for x in range(n)]
    arcs = {(x, y) if cls[x] == cls[y] else (y, x) for x, y in itertools.combinations(range(n), 2)}
    return rc.digraph(n, arcs, name=f"qstar_{m}").with_meta(cls=cls)


def s3(m: int) -> Structure:
    n = 3 * m
    cls = [x % 3 for x in range(n)]
    arcs = shift_classes(lambda x, y: 1 if x < y else 2, cls, n)
    return rc.digraph(n, arcs, name=f"s3_{m}").with_meta(cls=cls)


def pstar_from_poset(less: frozenset, cls: list[int]) -> set:
    """Shift poset values (``0`` incomparable, ``1`` below, ``2`` above) by class difference."""
    n = len(cls)

    def value(x, y):
        return 1 if (x, y) in less else 2 if (y, x) in less else 0

    return shift_classes(value, cls, n)


def niinf(n: int, m: int, seed: int = 0) -> Structure:
    """``n`` perpendicular classes of size ``m`` with generic orientations between classes.

    For odd ``n`` the orientation is a Cayley digraph of ``Z_n x Z_m`` (vertex
    ``i*m + x``), so translations act transitively; for even ``n`` no such
    orientation exists and each cross pair is oriented at random.
    """
    rnd = _rng("niinf", n, m, seed)
    cls = [v // m for v in range(n * m)]
    arcs = set()
    if n % 2:
        sign = {}
        for d in range(1, (n - 1) // 2 + 1):
            for e in range(m):
                s = rnd.random() < 0.5
                sign[(d, e)] = s
                sign[(n - d, (-e) % m)] = not s
        for u, v in itertools.permutations(range(n * m), 2):
            (i, x), (j, y) = divmod(u, m), divmod(v, m)
            if i != j and sign[((j - i) % n, (y - x) % m)]:
                arcs.add((u, v))
    else:
        for u, v in itertools.combinations(range(n * m), 2):
            if cls[u] != cls[v]:
                arcs.add((u, v) if rnd.random() < 0.5 else (v, u))
    return rc.digraph(n * m, arcs, name=f"niinf_{n}_{m}").with_meta(cls=cls)


def semigeneric(n: int, m: int, seed: int = 0) -> Structure:
    """Like :func:`niinf` but cross orientations follow ``phi(u) XOR psi(w)`` per class pair."""
    rnd = _rng("semigeneric", n, m, seed)
    cls = [v // m for v in range(n * m)]
    arcs = set()
    for i, j in itertools.combinations(range(n), 2):
        phi = [rnd.random() < 0.5 for _ in range(m)]
        psi = [rnd.random() < 0.5 for _ in range(m)]
        for x in range(m):
            for y in range(m):
                u, w = i * m + x, j * m + y
                arcs.add((u, w) if phi[x] ^ psi[y] else (w, u))
    return rc.digraph(n * m, arcs, name=f"semigeneric_{n}_{m}").with_meta(cls=cls)


def q2(n: int, seed: int = 0, perm: list[int] | None = None) -> Structure:
    """Two strict linear orders: the natural one and the order of ranks ``perm``."""
    if perm is None:
        perm = list(range(n))
        _rng("q2", n, seed).shuffle(perm)
    if sorted(perm) != list(range(n)):
        raise StructureError("perm must be a permutation")
    first = {(x, y) for x, y in itertools.combinations(range(n), 2)}
    second = {(x, y) for x in range(n) for y in range(n) if perm[x] < perm[y]}
    return Structure(BIORDER, n, (frozenset(first), frozenset(second)), name=f"q2_{n}").with_meta(
        base_order=list(range(n)), rank=list(perm))


# -- the family table -------------------------------------------------------

def _parse_nested(token, outer: FamilySpec | None = None) -> Structure:
    """Nested family reference such as ``"dicycle:3"`` for wreath and hat.

    Generated stages inherit seed, level and cap from the outer spec.
    """
    if isinstance(token, Structure):
        return token
    name, *args = str(token).split(":")
    extra = {} if outer is None else {"seed": outer.seed, "level": outer.level, "cap": outer.cap}
    return make(FamilySpec(name, tuple(int(a) for a in args), **extra))[0]


def _family_rado(spec: FamilySpec):
    sizes = range(spec.cap, max(spec.level, 1), -1)
    s, cert = _transitive_stage("rado", spec, sizes, lambda n, r: _sparse_circulant(n, r, spec.level), is_graph)
    return s.named("rado").with_meta(transitive=True), cert


def _family_knfree(spec: FamilySpec):
    (k,) = spec.params
    ok = kn_free(k)
    sizes = range(spec.cap, 1, -1)
    s, cert = _transitive_stage("knfree", spec, sizes, lambda n, r: _symmetric_circulant(n, r, ok), ok)
    return s.named(f"knfree_{k}").with_meta(transitive=True, forbidden=k), cert


def _family_tournament(spec: FamilySpec):
    sizes = [n for n in range(spec.cap, 0, -1) if n % 2]
    s, cert = _transitive_stage("tournament", spec, sizes, _circulant_tournament, is_tournament)
    return s.named("tournament").with_meta(transitive=True), cert


def _family_dn(spec: FamilySpec):
    (k,) = spec.params
    if k < 2:
        raise StructureError("dn needs n >= 2")
    ok = no_independent(k)
    sizes = range(spec.cap, 1, -1)
    s, cert = _transitive_stage("dn", spec, sizes, _circulant_dn(k), ok)
    return s.named(f"D_{k}").with_meta(transitive=True, forbidden=k), cert


def _family_h3(spec: FamilySpec):
    primes = sorted({_prime_at_most(n) for n in range(max(spec.cap, 5), 4, -1)}, reverse=True)
    s, cert = _transitive_stage("h3", spec, primes, _affine_hypergraph, is_hyper3, anchors=(0, 1))
    return s.named("h3").with_meta(transitive=True), cert


def _family_poset(spec: FamilySpec):
    s, cert, _ = _greedy_poset(spec)
    return s.named("poset"), cert


def _family_pstar(spec: FamilySpec):
    expanded, cert, cls = _greedy_poset(spec, classes=3)
    arcs = pstar_from_poset(expanded.rels[0], cls)
    s = rc.digraph(expanded.n, arcs, name="pstar").with_meta(cls=cls, base_poset=sorted(expanded.rels[0]))
    return s, cert


FAMILIES: dict[str, tuple[int, Callable]] = {
    "cycle": (1, lambda sp: (rc.cycle(*sp.params), None)),
    "dicycle": (1, lambda sp: (rc.dicycle(*sp.params), None)),
    "path": (1, lambda sp: (rc.path(*sp.params), None)),
    "complete": (1, lambda sp: (rc.complete(*sp.params), None)),
    "empty": (1, lambda sp: (rc.empty(*sp.params), None)),
    "mkn": (2, lambda sp: (rc.mkn(*sp.params), None)),
    "lk33": (0, lambda sp: (rc.line_graph_k33(), None)),
    "linear": (1, lambda sp: (rc.linear_order(*sp.params), None)),
    "wreath": (2, lambda sp: (rc.wreath(_parse_nested(sp.params[0], sp), _parse_nested(sp.params[1], sp)), None)),
    "hat": (1, lambda sp: (rc.hat(_parse_nested(sp.params[0], sp)), None)),
    "rado": (0, _family_rado),
    "knfree": (1, _family_knfree),
    "h3": (0, _family_h3),
    "tournament": (0, _family_tournament),
    "dn": (1, _family_dn),
    "poset": (0, _family_poset),
    "pstar": (0, _family_pstar),
    "qstar": (1, lambda sp: (qstar(*sp.params), None)),
    "s3": (1, lambda sp: (s3(*sp.params), None)),
    "niinf": (2, lambda sp: (niinf(*sp.params, seed=sp.seed), None)),
    "semigeneric": (2, lambda sp: (semigeneric(*sp.params, seed=sp.seed), None)),
    "q2": (1, lambda sp: (q2(*sp.params, seed=sp.seed), None)),
}


@functools.lru_cache(maxsize=128)
def make(spec: FamilySpec) -> tuple[Structure, StageCertificate | None]:
    """Build the structure described by ``spec``; certified stages come with a certificate."""
    s, cert = FAMILIES[spec.family][1](spec)
    return s.with_meta(family=spec.family), cert


def admissible_for(s: Structure, family: str) -> Admissible:
    """Age predicate of a generated family, used to re-check a stage."""
    k = s.meta.get("forbidden")
    table = {
        "rado": is_graph,
        "knfree": kn_free(k) if k else is_graph,
        "h3": is_hyper3,
        "tournament": is_tournament,
        "dn": no_independent(k) if k else is_oriented,
        "poset": is_poset,
        "q2": is_biorder,
    }
    if family not in table:
        raise UnknownFamily(f"no age predicate for {family!r}")
    return table[family]
