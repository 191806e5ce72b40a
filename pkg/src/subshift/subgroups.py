"""Subgroups of Z^d x G in Hermite normal form.

A subgroup H is stored through its preimage lattice L in Z^(d+t) under the
quotient map Z^(d+t) -> Z^d x Z/m_1 x ... x Z/m_t. L always contains the
rows m_i e_(d+i), and its row-style Hermite normal form (upper triangular,
positive pivots, entries above a pivot reduced into [0, pivot)) is a
canonical key for H. The quotient Gamma/H is Z^(d+t)/L, so the index of H
is the product of the pivots when L has full rank.
"""
from __future__ import annotations

import itertools
import math
from functools import cached_property
from typing import Iterable, Sequence

from .group import Element, FiniteSet, GroupError, GroupSpec, fset

INFINITE = math.inf


def hnf(rows: Iterable[Sequence[int]], ncols: int) -> tuple:
    """Row Hermite normal form of the lattice spanned by ``rows``.

    Zero rows are dropped, so the result has one row per pivot.
    """
    work = [list(r) for r in rows if any(r)]
    out = []
    col = 0
    while work and col < ncols:
        nz = [r for r in work if r[col] != 0]
        if not nz:
            col += 1
            continue
        rest = [r for r in work if r[col] == 0]
        # gcd reduction on column col
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            nxt = [p]
            for r in nz[1:]:
                q = r[col] // p[col]
                r = [a - q * b for a, b in zip(r, p)]
                if r[col] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            nz = nxt
        piv = nz[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        out.append(piv)
        work = rest
        col += 1
    # reduce entries above pivots
    pivcols = [next(j for j, a in enumerate(r) if a) for r in out]
    for i in range(len(out)):
        for k in range(i + 1, len(out)):
            c, p = pivcols[k], out[k][pivcols[k]]
            q = out[i][c] // p
            if q:
                out[i] = [a - q * b for a, b in zip(out[i], out[k])]
    return tuple(tuple(r) for r in out)


class Subgroup:
    """A subgroup of ``spec`` in canonical form.

    Parameters
    ----------
    spec : GroupSpec
        Ambient group.
    rows : tuple of tuple of int
        Hermite normal form of the preimage lattice (see module docstring).
    """

    def __init__(self, spec: GroupSpec, rows: tuple):
        self.spec = spec
        self.rows = rows

    @classmethod
    def from_generators(cls, gens: Iterable[Sequence[int]], spec: GroupSpec) -> "Subgroup":
        n = spec.ncoords
        rows = []
        for g in gens:
            g = tuple(g)
            if len(g) != n:
                raise GroupError(f"generator {g} has wrong length for {spec}")
            rows.append(g)
        d = spec.rank
        for i, m in enumerate(spec.moduli):
            e = [0] * n
            e[d + i] = m
            rows.append(e)
        return cls(spec, hnf(rows, n))

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.spec == other.spec and self.rows == other.rows

    def __hash__(self):
        return hash((self.spec, self.rows))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        idx = self.index
        return (idx if idx != INFINITE else float("inf"), self.rows)

    def __repr__(self):
        return f"Subgroup({self.generators_text()})"

    def generators_text(self) -> str:
        gens = self.generators()
        if not gens:
            return "0"
        return ";".join(",".join(str(x) for x in g) for g in gens)

    @cached_property
    def _pivots(self) -> tuple:
        return tuple(next(j for j, a in enumerate(r) if a) for r in self.rows)

    @property
    def has_full_rank(self) -> bool:
        return len(self.rows) == self.spec.ncoords

    @cached_property
    def index(self):
        if not self.has_full_rank:
            return INFINITE
        n = 1
        for i, r in enumerate(self.rows):
            n *= r[i]
        return n

    def generators(self) -> list:
        """Nonzero reduced generators of H as group elements."""
        out = []
        for r in self.rows:
            g = self.spec.reduce(r)
            if any(g) and g not in out:
                out.append(g)
        return out

    @cached_property
    def free_part(self) -> tuple:
        """HNF of the projection of H to Z^d."""
        d = self.spec.rank
        return hnf((r[:d] for r in self.rows), d)

    @cached_property
    def torsion_part(self) -> FiniteSet:
        """H intersected with {0} x G, as an explicit element list."""
        d = self.spec.rank
        zero = (0,) * d
        return fset(zero + t for t in self.spec.torsion_elements() if self.contains(zero + t))

    def contains(self, e: Sequence[int]) -> bool:
        x = list(e)
        for r, c in zip(self.rows, self._pivots):
            if x[c] % r[c]:
                return False
            q = x[c] // r[c]
            if q:
                x = [a - q * b for a, b in zip(x, r)]
        return not any(x)

    def contains_subgroup(self, other: "Subgroup") -> bool:
        return all(self.contains(r) for r in other.rows)

    def reduce(self, e: Sequence[int]) -> Element:
        """Representative of e + H inside the fundamental domain."""
        if not self.has_full_rank:
            raise GroupError("coset reduction needs a finite-index subgroup")
        x = list(e)
        for i, r in enumerate(self.rows):
            q = x[i] // r[i]
            if q:
                x = [a - q * b for a, b in zip(x, r)]
        return tuple(x)

    def fundamental_domain(self) -> FiniteSet:
        if not self.has_full_rank:
            raise GroupError("fundamental domain needs a finite-index subgroup")
        return tuple(itertools.product(*(range(r[i]) for i, r in enumerate(self.rows))))

    def __contains__(self, e):
        return self.contains(e)


def subgroup_canonicalize(generators: Iterable[Sequence[int]], spec: GroupSpec) -> Subgroup:
    return Subgroup.from_generators(generators, spec)


def subgroup_index(sub: Subgroup):
    return sub.index


def _upper_hnfs(det: int, n: int):
    """All full-rank upper triangular HNF matrices of size n with determinant det."""
    def diags(k, rem):
        if k == 1:
            yield (rem,)
            return
        for a in range(1, rem + 1):
            if rem % a == 0:
                for rest in diags(k - 1, rem // a):
                    yield (a,) + rest

    if n == 0:
        if det == 1:
            yield ()
        return
    for diag in diags(n, det):
        slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
        ranges = [range(diag[j]) for i, j in slots]
        for vals in itertools.product(*ranges):
            m = [[0] * n for _ in range(n)]
            for i in range(n):
                m[i][i] = diag[i]
            for (i, j), v in zip(slots, vals):
                m[i][j] = v
            yield tuple(tuple(r) for r in m)


def enumerate_subgroups(max_index: int, spec: GroupSpec, exact: bool = False) -> list:
    """Subgroups of index at most ``max_index`` (or exactly, if ``exact``)."""
    if spec.rank > 2:
        raise GroupError("subgroup enumeration supports rank at most 2")
    n = spec.ncoords
    d = spec.rank
    tors_rows = []
    for i, m in enumerate(spec.moduli):
        e = [0] * n
        e[d + i] = m
        tors_rows.append(e)
    out = []
    dets = [max_index] if exact else range(1, max_index + 1)
    for det in dets:
        for rows in _upper_hnfs(det, n):
            sub = Subgroup(spec, rows)
            if all(sub.contains(r) for r in tors_rows):
                out.append(sub)
    return sorted(out)


def overgroups(sub: Subgroup, proper: bool = True) -> list:
    """All subgroups containing ``sub`` (finite index only)."""
    idx = sub.index
    if idx == INFINITE:
        raise GroupError("overgroups are enumerated for finite-index subgroups only")
    out = []
    for k in range(1, idx + 1):
        if idx % k:
            continue
        for s in enumerate_subgroups(k, sub.spec, exact=True):
            if s.contains_subgroup(sub) and (not proper or s != sub):
                out.append(s)
    return out


def fundamental_domain(sub: Subgroup) -> FiniteSet:
    return sub.fundamental_domain()


def parse_subgroup(text: str, spec: GroupSpec) -> Subgroup:
    """Parse ``"2,0;0,2"`` style generator rows."""
    gens = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        gens.append(tuple(int(x) for x in part.split(",")))
    return Subgroup.from_generators(gens, spec)
