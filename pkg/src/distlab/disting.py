"""Distinguishing partitions and distinguishing numbers.

The exact search enumerates restricted-growth strings (set partitions up to
relabelling of blocks) in lexicographic order, so the first witness found is
the lexicographically least one.  Two pruning rules keep it small, both
sound for that order:

* orbit rule: if ``y`` lies in the orbit of ``x < y`` under the pointwise
  stabilizer of ``0..x-1``, a lexicographically least witness has
  ``w[x] <= w[y]``;
* support rule: if a non-identity automorphism moves only already-coloured
  elements and respects their colours, no completion can distinguish.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Sequence

from distlab.autgroup import automorphisms, nontrivial_automorphism
from distlab.relcore import Structure, StructureError, graph


@dataclass(frozen=True)
class Partition:
    """Block id per element; ids ``0..k-1`` are all used."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        used = set(self.blocks)
        if used != set(range(len(used))):
            raise StructureError(f"block ids must be exactly 0..k-1, got {sorted(used)}")

    @classmethod
    def from_labels(cls, labels: Sequence) -> Partition:
        """Renumber arbitrary labels in order of first appearance."""
        first: dict = {}
        for lab in labels:
            first.setdefault(lab, len(first))
        return cls(tuple(first[lab] for lab in labels))

    @classmethod
    def from_blocks(cls, n: int, blocks: Sequence[Sequence[int]]) -> Partition:
        labels = [None] * n
        for i, block in enumerate(blocks):
            for x in block:
                labels[x] = i
        if None in labels:
            raise StructureError("blocks do not cover the domain")
        return cls.from_labels(labels)

    @property
    def k(self) -> int:
        return len(set(self.blocks))

    def members(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.k)]
        for x, b in enumerate(self.blocks):
            out[b].append(x)
        return out

    def __str__(self):
        return f"partition {self.k}: " + " ".join(map(str, self.blocks))


def parse_partition(text: str) -> Partition:
    head, _, body = text.partition(":")
    parts = head.split()
    if len(parts) != 2 or parts[0] != "partition" or not parts[1].isdigit():
        raise StructureError(f"bad partition line {text!r}")
    p = Partition(tuple(int(x) for x in body.split()))
    if p.k != int(parts[1]):
        raise StructureError(f"partition declares {parts[1]} blocks but uses {p.k}")
    return p


def is_distinguishing(s: Structure, p: Partition | Sequence[int]) -> bool:
    blocks = p.blocks if isinstance(p, Partition) else tuple(p)
    if len(blocks) != s.n:
        raise StructureError(f"partition has {len(blocks)} entries for a domain of {s.n}")
    return nontrivial_automorphism(s, blocks) is None


@dataclass
class DistResult:
    k: int | None
    witness: Partition | None
    max_k: int
    elapsed_ms: float
    nodes: int

    @property
    def exceeded(self) -> bool:
        return self.k is None

    def as_dict(self, name: str = "") -> dict:
        return {
            "structure": name,
            "D": self.k if self.k is not None else f">{self.max_k}",
            "witness": list(self.witness.blocks) if self.witness else None,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


def _orbit_lower_bounds(s: Structure) -> list[list[int]]:
    """For each ``y``, the ``x < y`` whose stabilizer-chain orbit contains ``y``."""
    g = automorphisms(s, base=range(s.n))
    lower: list[list[int]] = [[] for _ in range(s.n)]
    for x, trans in g.levels:
        for y in trans:
            if y > x:
                lower[y].append(x)
    return lower


class _Search:
    def __init__(self, s: Structure):
        self.s = s
        self.lower = _orbit_lower_bounds(s)
        self.nodes = 0

    def _blocked(self, w: list[int], depth: int, k: int) -> bool:
        colors = w[:depth] + [k + i for i in range(self.s.n - depth)]
        return nontrivial_automorphism(self.s, colors) is not None

    def run(self, k: int) -> tuple[int, ...] | None:
        n = self.s.n
        w = [0] * n

        def dfs(depth: int, used: int) -> bool:
            self.nodes += 1
            if self._blocked(w, depth, k):
                return False
            if depth == n:
                return True
            lo = max((w[x] for x in self.lower[depth]), default=0)
            for c in range(lo, min(k, used + 1)):
                w[depth] = c
                if dfs(depth + 1, max(used, c + 1)):
                    return True
            return False

        return tuple(w) if dfs(0, 0) else None


def distinguishing_number(s: Structure, max_k: int | None = None) -> DistResult:
    """Least number of blocks of a distinguishing partition, with the least witness."""
    if max_k is None:
        max_k = max(s.n, 1)
    if max_k < 1:
        raise ValueError("max_k must be at least 1")
    start = time.perf_counter()
    search = _Search(s)
    for k in range(1, max_k + 1):
        found = search.run(k)
        if found is not None:
            witness = Partition(found) if s.n else Partition(())
            return DistResult(witness.k if s.n else 1, witness, max_k,
                              (time.perf_counter() - start) * 1e3, search.nodes)
    return DistResult(None, None, max_k, (time.perf_counter() - start) * 1e3, search.nodes)


def exists_distinguishing(s: Structure, k: int) -> tuple[int, ...] | None:
    """Least restricted-growth witness with at most ``k`` blocks, or None."""
    return _Search(s).run(k)


def brute_force_distinguishing_number(s: Structure) -> int:
    """Reference value by scanning every labelling with ``k`` labels, ``k = 1, 2, ...``."""
    for k in range(1, s.n + 1):
        for labels in itertools.product(range(k), repeat=s.n):
            if is_distinguishing(s, labels):
                return len(set(labels))
    return max(s.n, 1)


def least_k_binom(m: int, n: int) -> int:
    """Least ``k`` with ``C(k, n) >= m``; the distinguishing number of ``m`` copies of ``K_n``."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    k = n
    while math.comb(k, n) < m:
        k += 1
    return k


def least_k_2binom(n: int) -> int:
    """Least ``k`` with ``2 C(k, 2) >= n``, taking 1 for ``n = 1``."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return 1
    k = 2
    while 2 * math.comb(k, 2) < n:
        k += 1
    return k


CENSUS_MAX_N = 7


def rigidity_census(max_n: int) -> dict[int, int]:
    """Number of labelled graphs on ``n`` vertices with trivial automorphism group, per ``n``."""
    if max_n > CENSUS_MAX_N:
        raise ValueError(f"exhaustive census is limited to n <= {CENSUS_MAX_N}")
    counts = {}
    for n in range(1, max_n + 1):
        pairs = list(itertools.combinations(range(n), 2))
        rigid = 0
        for mask in range(1 << len(pairs)):
            g = graph(n, (e for i, e in enumerate(pairs) if mask >> i & 1))
            if nontrivial_automorphism(g) is None:
                rigid += 1
        counts[n] = rigid
    return counts
