"""Clopen subsets of an SFT as unions of cylinders over a common window."""
from __future__ import annotations

from typing import Iterable

import numpy as np

from .group import fset
from .patterns import Pattern, SftSpec, language_rows


class AmbientMismatch(ValueError):
    pass


def cached_language(X: SftSpec, window) -> tuple:
    """``(rows, exact)`` for the language of X on a window, memoized on X."""
    key = ("lang", tuple(window))
    if key not in X._cache:
        cells, rows, exact = language_rows(X, window)
        X._cache[key] = (rows, exact)
    return X._cache[key]


class ClopenSet:
    """Union of the cylinders [p], p in ``allowed``, over ``window``.

    Patterns outside the language of the ambient SFT are dropped on
    construction, so emptiness and inclusion reduce to set operations.
    They are exact whenever the language is (rank at most 1, or a
    certified safe symbol) and local otherwise; see :attr:`exact`.
    """

    def __init__(self, X: SftSpec, window: Iterable, allowed: Iterable[tuple]):
        self.X = X
        self.window = fset(X.group.reduce(tuple(w)) for w in window)
        rows, exact = cached_language(X, self.window)
        lang = {tuple(int(v) for v in r) for r in rows}
        self.allowed = frozenset(tuple(a) for a in allowed) & lang
        self.exact = exact

    @classmethod
    def cylinder(cls, X: SftSpec, p: Pattern) -> "ClopenSet":
        return cls(X, p.support, [p.values])

    @classmethod
    def whole(cls, X: SftSpec, window=None) -> "ClopenSet":
        window = window or (X.group.zero(),)
        rows, _ = cached_language(X, fset(window))
        return cls(X, window, [tuple(int(v) for v in r) for r in rows])

    @classmethod
    def empty(cls, X: SftSpec) -> "ClopenSet":
        return cls(X, (X.group.zero(),), [])

    def __repr__(self):
        return f"ClopenSet(window={self.window}, patterns={len(self.allowed)})"

    def _check(self, other: "ClopenSet"):
        if other.X is not self.X and other.X != self.X:
            raise AmbientMismatch("clopen sets live in different subshifts")

    def refine(self, window) -> "ClopenSet":
        window = fset(set(window) | set(self.window))
        if window == self.window:
            return self
        rows, _ = cached_language(self.X, window)
        pos = [window.index(w) for w in self.window]
        keep = [tuple(int(v) for v in r) for r in rows
                if tuple(int(r[i]) for i in pos) in self.allowed]
        return ClopenSet(self.X, window, keep)

    def _common(self, other: "ClopenSet"):
        self._check(other)
        w = fset(set(self.window) | set(other.window))
        return self.refine(w), other.refine(w)

    def union(self, other: "ClopenSet") -> "ClopenSet":
        a, b = self._common(other)
        return ClopenSet(self.X, a.window, a.allowed | b.allowed)

    def intersection(self, other: "ClopenSet") -> "ClopenSet":
        a, b = self._common(other)
        return ClopenSet(self.X, a.window, a.allowed & b.allowed)

    def difference(self, other: "ClopenSet") -> "ClopenSet":
        a, b = self._common(other)
        return ClopenSet(self.X, a.window, a.allowed - b.allowed)

    def complement(self) -> "ClopenSet":
        rows, _ = cached_language(self.X, self.window)
        every = {tuple(int(v) for v in r) for r in rows}
        return ClopenSet(self.X, self.window, every - self.allowed)

    def shift(self, g) -> "ClopenSet":
        """sigma_g(C) = {sigma_g x : x in C}; its window is W - g."""
        spec = self.X.group
        ng = spec.neg(g)
        new_w = spec.translate(self.window, ng)
        pos = [new_w.index(spec.add(w, ng)) for w in self.window]
        out = []
        for a in self.allowed:
            vals = [0] * len(a)
            for i, v in zip(pos, a):
                vals[i] = v
            out.append(tuple(vals))
        return ClopenSet(self.X, new_w, out)

    def is_empty(self) -> bool:
        return not self.allowed

    def issubset(self, other: "ClopenSet") -> bool:
        return self.difference(other).is_empty()

    def __eq__(self, other):
        if not isinstance(other, ClopenSet):
            return NotImplemented
        a, b = self._common(other)
        return a.allowed == b.allowed

    def __hash__(self):
        return hash(self.window)

    def contains_at(self, lookup, v) -> bool:
        """Whether sigma_v x lies in C, reading x through ``lookup(element)``."""
        spec = self.X.group
        vals = tuple(lookup(spec.add(v, w)) for w in self.window)
        return vals in self.allowed

    def patterns(self) -> list:
        return [Pattern(self.window, a) for a in sorted(self.allowed)]

    def minimize(self) -> "ClopenSet":
        """Drop window cells that the set does not depend on."""
        cur = self
        changed = True
        while changed and len(cur.window) > 1:
            changed = False
            for i in range(len(cur.window)):
                w2 = cur.window[:i] + cur.window[i + 1:]
                proj = {a[:i] + a[i + 1:] for a in cur.allowed}
                cand = ClopenSet(cur.X, w2, proj)
                if cand.refine(cur.window).allowed == cur.allowed:
                    cur = cand
                    changed = True
                    break
        return cur
