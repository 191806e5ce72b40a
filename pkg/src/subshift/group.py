"""Arithmetic and geometry on Z^d x G with G a finite abelian group.

Group elements are plain tuples ``(free coords..., torsion residues...)``
with residues reduced. The canonical order on elements is ordinary tuple
order, which compares the free part lexicographically first and then the
torsion residues. Finite sets are sorted tuples of elements.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Sequence

Element = tuple
FiniteSet = tuple


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    """The group Z^rank x Z/m_1 x ... x Z/m_t.

    Parameters
    ----------
    rank : int
        Number of free coordinates.
    moduli : tuple of int
        Orders of the cyclic torsion factors, each at least 2.
    """

    rank: int
    moduli: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "moduli", tuple(int(m) for m in self.moduli))
        if self.rank < 0:
            raise GroupError("rank must be nonnegative")
        for m in self.moduli:
            if m < 2:
                raise GroupError(f"modulus {m} < 2")

    @property
    def ncoords(self) -> int:
        return self.rank + len(self.moduli)

    @property
    def torsion_order(self) -> int:
        n = 1
        for m in self.moduli:
            n *= m
        return n

    def zero(self) -> Element:
        return (0,) * self.ncoords

    def element(self, free: Sequence[int], torsion: Sequence[int] = ()) -> Element:
        if len(free) != self.rank or len(torsion) != len(self.moduli):
            raise GroupError(f"element shape mismatch for {self}")
        return self.reduce(tuple(free) + tuple(torsion))

    def reduce(self, e: Sequence[int]) -> Element:
        d = self.rank
        if len(e) != self.ncoords:
            raise GroupError(f"element {tuple(e)} has wrong length for {self}")
        if not self.moduli:
            return tuple(e)
        return tuple(e[:d]) + tuple(x % m for x, m in zip(e[d:], self.moduli))

    def add(self, a: Element, b: Element) -> Element:
        d = self.rank
        s = [x + y for x, y in zip(a, b)]
        for i, m in enumerate(self.moduli):
            s[d + i] %= m
        return tuple(s)

    def neg(self, a: Element) -> Element:
        d = self.rank
        return tuple(-x for x in a[:d]) + tuple((-x) % m for x, m in zip(a[d:], self.moduli))

    def sub(self, a: Element, b: Element) -> Element:
        return self.add(a, self.neg(b))

    def scale(self, n: int, a: Element) -> Element:
        return self.reduce(tuple(n * x for x in a))

    def free(self, a: Element) -> tuple:
        return a[: self.rank]

    def torsion(self, a: Element) -> tuple:
        return a[self.rank:]

    def torsion_elements(self) -> list:
        return list(itertools.product(*(range(m) for m in self.moduli)))

    def translate(self, S: Iterable[Element], v: Element) -> FiniteSet:
        return fset(self.add(s, v) for s in S)

    def minkowski(self, A: Iterable[Element], B: Iterable[Element]) -> FiniteSet:
        B = list(B)
        return fset(self.add(a, b) for a in A for b in B)

    def difference(self, A: Iterable[Element], B: Iterable[Element]) -> FiniteSet:
        B = list(B)
        return fset(self.sub(a, b) for a in A for b in B)

    def negate_set(self, A: Iterable[Element]) -> FiniteSet:
        return fset(self.neg(a) for a in A)

    def is_symmetric(self, A: Iterable[Element]) -> bool:
        A = fset(A)
        return self.negate_set(A) == A


def fset(items: Iterable) -> FiniteSet:
    """Sorted, deduplicated tuple."""
    return tuple(sorted(set(items)))


def make_box(k: int, spec: GroupSpec) -> FiniteSet:
    """Return B_k = {-k..k}^d x G."""
    if k < 0:
        raise GroupError("box radius must be nonnegative")
    free = itertools.product(range(-k, k + 1), repeat=spec.rank)
    return fset(f + t for f in free for t in spec.torsion_elements())


def make_annulus(n: int, spec: GroupSpec) -> FiniteSet:
    """Return Q_n = B_n minus B_{floor(n/10)}."""
    inner = set(make_box(n // 10, spec))
    return tuple(e for e in make_box(n, spec) if e not in inner)


def make_interval_box(lo: Sequence[int], hi: Sequence[int], spec: GroupSpec) -> FiniteSet:
    """Product of closed integer intervals [lo_i, hi_i] times G."""
    free = itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi)))
    return fset(f + t for f in free for t in spec.torsion_elements())


def k_boundary(K: Iterable[Element], F: Iterable[Element], spec: GroupSpec) -> FiniteSet:
    """K-boundary of F: sites g with g+K meeting both F and its complement."""
    K = fset(K)
    if not K:
        raise GroupError("K must be nonempty")
    Fs = set(F)
    out = []
    for g in spec.difference(Fs, K):
        hits = sum(1 for k in K if spec.add(g, k) in Fs)
        if 0 < hits < len(K):
            out.append(g)
    return fset(out)


def is_invariant(K, eps, F, spec: GroupSpec) -> bool:
    """True iff |boundary_K F| < eps |F| with exact rational comparison."""
    F = fset(F)
    if not F:
        raise GroupError("F must be nonempty")
    eps = Fraction(eps)
    if eps <= 0:
        raise GroupError("eps must be positive")
    return len(k_boundary(K, F, spec)) < eps * len(F)


def is_separated(A, B, spec: GroupSpec) -> bool:
    """Translates a+B (a in A) are pairwise disjoint."""
    dA = set(spec.difference(A, A))
    dB = set(spec.difference(B, B))
    dA.discard(spec.zero())
    return not (dA & dB)


def maximal_separated(K, domain, spec: GroupSpec) -> FiniteSet:
    """Greedy maximal K-separated subset of ``domain``.

    ``domain`` is either a finite set of elements or a finite-index
    :class:`~subshift.subgroups.Subgroup`, in which case the scan runs over
    its fundamental domain and separation is taken in the quotient.
    """
    K = fset(K)
    reduce = None
    if hasattr(domain, "fundamental_domain"):
        reduce = domain.reduce
        domain = domain.fundamental_domain()
    taken: set = set()
    out = []
    for c in sorted(domain):
        cells = [spec.add(c, k) for k in K]
        if reduce is not None:
            cells = [reduce(x) for x in cells]
        if taken.isdisjoint(cells):
            taken.update(cells)
            out.append(c)
    return tuple(out)


@total_ordering
@dataclass(frozen=True)
class MetricValue:
    """Exact value sqrt(sq) + delta."""

    sq: int
    delta: int

    def _cmp(self, other: "MetricValue") -> int:
        a, da, b, db = self.sq, self.delta, other.sq, other.delta
        if da == db:
            return (a > b) - (a < b)
        if da == 1:
            return _cmp_plus_one(a, b)
        return -_cmp_plus_one(b, a)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __eq__(self, other):
        if not isinstance(other, MetricValue):
            return NotImplemented
        return self._cmp(other) == 0

    def __hash__(self):
        # sqrt(s^2) equals sqrt((s-1)^2) + 1; nothing else coincides
        if self.delta == 0 and self.sq > 0:
            r = math.isqrt(self.sq)
            if r * r == self.sq:
                return hash(((r - 1) ** 2, 1))
        return hash((self.sq, self.delta))

    def __float__(self):
        return self.sq ** 0.5 + self.delta


def _cmp_plus_one(a: int, b: int) -> int:
    """Sign of (sqrt(a) + 1) - sqrt(b)."""
    if b <= a:
        return 1
    c = b - a - 1
    # sqrt(a)+1 vs sqrt(b)  <=>  2 sqrt(a) vs c
    if c < 0:
        return 1
    lhs, rhs = 4 * a, c * c
    return (lhs > rhs) - (lhs < rhs)


def metric(g1: Element, g2: Element, spec: GroupSpec) -> MetricValue:
    d = spec.rank
    sq = sum((x - y) ** 2 for x, y in zip(g1[:d], g2[:d]))
    return MetricValue(sq, 0 if tuple(g1) == tuple(g2) else 1)


def metric_and_order(g1: Element, g2: Element, spec: GroupSpec) -> tuple:
    """Distance and the sign of g1 vs g2 in the canonical order."""
    g1, g2 = spec.reduce(g1), spec.reduce(g2)
    return metric(g1, g2, spec), (g1 > g2) - (g1 < g2)


def free_norm2(g: Element, spec: GroupSpec) -> int:
    return sum(x * x for x in g[: spec.rank])
