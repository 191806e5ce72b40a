"""Marker sets: merging P-markers and the clopen marker construction."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .clopen import ClopenSet, cached_language
from .group import GroupError, fset
from .patterns import Pattern, SftSpec
from .subgroups import INFINITE, enumerate_subgroups


class MarkerError(ValueError):
    """A marker precondition failed; ``witness`` carries the evidence."""

    def __init__(self, msg: str, witness: dict | None = None):
        super().__init__(msg)
        self.witness = witness or {}


def _check_P(P, spec):
    P = fset(spec.reduce(tuple(p)) for p in P)
    if spec.zero() in P:
        raise GroupError("P must not contain 0")
    if not spec.is_symmetric(P):
        raise GroupError("P must be symmetric")
    return P


def is_marker(C: ClopenSet, P) -> bool:
    return all(C.intersection(C.shift(g)).is_empty() for g in P)


def covered_by_translates(V: ClopenSet, C: ClopenSet, P) -> bool:
    """V is inside C union sigma_g(C) over g in P."""
    U = C
    for g in P:
        U = U.union(C.shift(g))
    return V.issubset(U)


def merge_markers(A: ClopenSet, B: ClopenSet, P) -> ClopenSet:
    """C = A u (B minus the P-translates of A), with all four postconditions checked."""
    spec = A.X.group
    P = _check_P(P, spec)
    for name, M in (("A", A), ("B", B)):
        for g in P:
            if not M.intersection(M.shift(g)).is_empty():
                raise MarkerError(f"{name} is not a P-marker: it meets its shift by {g}",
                                  {"set": name, "shift": g})
    cover = A
    for g in P:
        cover = cover.union(A.shift(g))
    C = A.union(B.difference(cover))
    if not is_marker(C, P):
        raise AssertionError("merged set is not a P-marker")
    if not A.issubset(C):
        raise AssertionError("merged set misses part of A")
    if not covered_by_translates(B, C, P):
        raise AssertionError("merged set does not cover B")
    if not C.issubset(A.union(B)):
        raise AssertionError("merged set leaves A u B")
    return C


# ----------------------------------------------------------------------------
# marker lemma


@dataclass
class MarkerSet:
    """A P-marker C inside V given by cylinder classes with a priority order.

    ``classes`` maps each admissible V-cylinder on ``window`` to a class
    index. Site v is marked when its cylinder has a class c and no site in
    v+P has a smaller class and is itself marked. Each class is a P-marker,
    so this is the sequential merge of the classes in order.
    """

    X: SftSpec
    V: ClopenSet
    P: tuple
    window: tuple
    classes: dict
    nclasses: int
    info: dict = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return self.nclasses

    def class_sets(self) -> list:
        out = [[] for _ in range(self.nclasses)]
        for p, c in sorted(self.classes.items()):
            out[c].append(p)
        return [ClopenSet(self.X, self.window, s) for s in out]

    def evaluator(self, lookup: Callable) -> "MarkerEvaluator":
        return MarkerEvaluator(self, lookup)

    def clopen(self, max_cells: int = 14) -> ClopenSet:
        """Explicit clopen set by sequential merges (window grows by P each step)."""
        sets = self.class_sets()
        grow = len(self.window) + (self.nclasses - 1) * len(self.P)
        if self.X.rank >= 2 and grow > 4 * max_cells:
            raise MarkerError("explicit marker set exceeds the window budget")
        C = sets[0]
        for S in sets[1:]:
            C = merge_markers(C, S, self.P)
            if len(C.window) > max_cells and self.X.rank >= 2:
                raise MarkerError("explicit marker set exceeds the window budget")
        return C

    def evaluate(self, x: Pattern, sites: Iterable | None = None) -> dict:
        """alpha on a finite pattern: ``{site: 0 | 1}`` for sites with enough context."""
        d = x.as_dict()
        ev = self.evaluator(d.get)
        out = {}
        for v in (x.support if sites is None else sites):
            a = ev.alpha(v)
            if a is not None:
                out[v] = a
        return out


class MarkerEvaluator:
    """Memoized layered evaluation of alpha; ``None`` marks missing context."""

    def __init__(self, M: MarkerSet, lookup: Callable):
        self.M = M
        self.lookup = lookup
        self.spec = M.X.group
        self._cls: dict = {}
        self._alpha: dict = {}
        self._inv_cls = M.nclasses  # class index used for "not in V"

    def cls(self, v):
        if v in self._cls:
            return self._cls[v]
        vals = []
        for w in self.M.window:
            s = self.lookup(self.spec.add(v, w))
            if s is None:
                self._cls[v] = None
                return None
            vals.append(s)
        c = self.M.classes.get(tuple(vals), self._inv_cls)
        self._cls[v] = c
        return c

    def alpha(self, v):
        if v in self._alpha:
            return self._alpha[v]
        # iterative post-order to avoid deep recursion
        stack = [v]
        while stack:
            u = stack[-1]
            if u in self._alpha:
                stack.pop()
                continue
            res, pending = self._try(u)
            if pending:
                stack.extend(pending)
                continue
            self._alpha[u] = res
            stack.pop()
        return self._alpha[v]

    def _try(self, v):
        c = self.cls(v)
        if c is None:
            return None, []
        if c >= self._inv_cls:
            return 0, []
        unknown = False
        pending = []
        for g in self.M.P:
            u = self.spec.add(v, g)
            cu = self.cls(u)
            if cu is None:
                unknown = True
                continue
            if cu >= c:
                continue
            if u not in self._alpha:
                pending.append(u)
                continue
            au = self._alpha[u]
            if au == 1:
                return 0, []
            if au is None:
                unknown = True
        if pending:
            return None, pending
        return (None if unknown else 1), []


def _periodic_witness(X: SftSpec, V: ClopenSet, P, max_index: int):
    """A periodic point in V fixed by some g in P, if one exists at small index."""
    from .periodic import torus_rows
    spec = X.group
    if spec.rank > 2:
        return None
    subs = enumerate_subgroups(max_index, spec)
    for g in P:
        for s in subs:
            if not s.contains(g):
                continue
            dom, rows = torus_rows(X, s)
            pos = {c: i for i, c in enumerate(dom)}
            for r in rows:
                look = lambda e, r=r: int(r[pos[s.reduce(e)]])
                if V.contains_at(look, spec.zero()):
                    return {"shift": g, "subgroup": s.generators_text(),
                            "domain": [list(c) for c in dom], "point": [int(t) for t in r]}
    return None


def _dsatur(nodes: list, adj: dict) -> dict:
    """DSatur coloring; ties go to higher degree, then the least node."""
    color: dict = {}
    sat = {v: set() for v in nodes}
    deg = {v: len(adj[v]) for v in nodes}
    heap = [(0, -deg[v], v) for v in nodes]
    heapq.heapify(heap)
    while heap:
        ns, _, v = heapq.heappop(heap)
        if v in color or -ns != len(sat[v]):
            continue
        c = 0
        while c in sat[v]:
            c += 1
        color[v] = c
        for u in adj[v]:
            if u not in color and c not in sat[u]:
                sat[u].add(c)
                heapq.heappush(heap, (-len(sat[u]), -deg[u], u))
    return color


def _codes(block: np.ndarray, q: int):
    """Row codes sum v_j q^j; Python ints when int64 could overflow."""
    n = block.shape[1]
    if n * np.log2(max(q, 2)) < 62:
        w = q ** np.arange(n, dtype=np.int64)
        return block.astype(np.int64) @ w
    return np.array([sum(int(v) * q ** j for j, v in enumerate(r)) for r in block], dtype=object)


def _decode(code: int, q: int, n: int) -> tuple:
    out = []
    for _ in range(n):
        code, r = divmod(code, q)
        out.append(r)
    return tuple(out)


def marker_lemma(X: SftSpec, V: ClopenSet, P, max_k: int = 4,
                 witness_index: int | None = None) -> MarkerSet:
    """Clopen P-marker C inside V whose P-translates cover V.

    The verification window grows until every admissible V-cylinder on it
    is a P-marker; the cylinders are then grouped into P-marker classes by
    coloring their conflict graph and merged class by class.
    """
    spec = X.group
    P = _check_P(P, spec)
    if witness_index is None:
        if spec.rank <= 1:
            witness_index = max([1] + [abs(g[0]) for g in P if spec.rank]) * spec.torsion_order
        else:
            witness_index = 4 * spec.torsion_order
    wit = _periodic_witness(X, V, P, witness_index)
    if wit is not None:
        raise MarkerError(f"V contains a point fixed by {wit['shift']}", wit)
    P0 = fset(set(P) | {spec.zero()})
    M = V.window
    for k in range(max_k + 1):
        if k:
            M = spec.minkowski(M, P0)
        Vk = V.refine(M)
        cyl = set(Vk.allowed)
        bad = None
        edges = {p: set() for p in cyl}
        for g in P:
            shifted = spec.translate(M, spec.neg(g))
            U = fset(set(M) | set(shifted))
            rows, _ = cached_language(X, U)
            pa = [U.index(m) for m in M]
            pb = [U.index(spec.sub(m, g)) for m in M]
            if rows.shape[0] == 0:
                continue
            ua, ia = np.unique(_codes(rows[:, pa], X.q), return_inverse=True)
            ub, ib = np.unique(_codes(rows[:, pb], X.q), return_inverse=True)
            ka = [_decode(int(c), X.q, len(M)) for c in ua]
            kb = [_decode(int(c), X.q, len(M)) for c in ub]
            nb = len(ub)
            for pc in np.unique(ia.ravel() * nb + ib.ravel()).tolist():
                a, b = ka[pc // nb], kb[pc % nb]
                if a in cyl and b in cyl:
                    if a == b:
                        bad = (a, g)
                        break
                    edges[a].add(b)
                    edges[b].add(a)
            if bad:
                break
        if bad is None:
            nodes = sorted(cyl)
            color = _dsatur(nodes, edges)
            n = 1 + max(color.values()) if color else 0
            info = {"k": k, "cylinders": len(nodes), "classes": n,
                    "exact": Vk.exact}
            return MarkerSet(X, V, P, M, color, n, info)
        last_bad = bad
    a, g = last_bad
    raise MarkerError(f"a {g}-periodic pattern survives at window scale {max_k}",
                      {"shift": g, "window": [list(m) for m in M], "pattern": list(a)})


def verify_marker(X: SftSpec, V: ClopenSet, P, C: ClopenSet) -> dict:
    """Independent check of the two marker conclusions plus C inside V."""
    P = _check_P(P, X.group)
    disjoint = {str(g): C.intersection(C.shift(g)).is_empty() for g in P}
    return {"disjoint": all(disjoint.values()), "per_shift": disjoint,
            "covering": covered_by_translates(V, C, P), "inside": C.issubset(V),
            "exact": C.exact}
