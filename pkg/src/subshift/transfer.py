"""Transfer graphs for subshifts that are Z times a finite section.

A *frame* identifies the group (or a quotient of it) with pairs (s, t)
where s is an integer and t runs over a finite section. Two frames are used:
``Z x G`` for rank-1 groups and the strip ``Z^2 / <n v>`` for a primitive
vector v. States of the transfer graph are admissible blocks of L
consecutive sections; edges are admissible blocks of L+1 sections.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .group import GroupError, GroupSpec
from .patterns import DEFAULT_BUDGET, BudgetError, SftSpec, compile_domain


class LineFrame:
    """Rank-1 group Z x G; sections are copies of G."""

    def __init__(self, spec: GroupSpec):
        if spec.rank != 1:
            raise GroupError("line frame needs rank 1")
        self.spec = spec
        self.sections = tuple(spec.torsion_elements())
        self._tidx = {t: i for i, t in enumerate(self.sections)}

    @property
    def nsec(self) -> int:
        return len(self.sections)

    def to_cell(self, e):
        return (e[0], self._tidx[tuple(e[1:])])

    def from_cell(self, s, t):
        return (s,) + self.sections[t]


class StripFrame:
    """Z^2 modulo <n v> for primitive v; sections are residues r mod n.

    A lattice point is written s*u + r*v with (u, v) a unimodular basis;
    u is chosen to make the clause supports as thin as possible in s.
    """

    def __init__(self, spec: GroupSpec, v, n: int, X: SftSpec | None = None):
        if spec.rank != 2 or spec.moduli:
            raise GroupError("strip frame needs the group Z^2")
        v = tuple(int(x) for x in v)
        if math.gcd(*v) != 1:
            raise GroupError(f"vector {v} is not primitive")
        if n < 1:
            raise GroupError("n must be positive")
        self.spec = spec
        self.v = v
        self.n = n
        a, b = v
        # solve x*b - y*a = 1 for u = (x, y)
        g, x0, y0 = _ext_gcd(b, -a)
        if g < 0:
            x0, y0 = -x0, -y0
        base = (x0, y0)
        best = None
        for k in range(-12, 13):
            u = (base[0] + k * a, base[1] + k * b)
            self.u = u
            width = self._width(X) if X is not None else abs(u[0]) + abs(u[1])
            key = (width, abs(u[0]) + abs(u[1]), u)
            if best is None or key < best[0]:
                best = (key, u)
        self.u = best[1]

    def _width(self, X: SftSpec) -> int:
        w = 0
        for S, _ in X.clause_groups():
            ss = [self.coords(e)[0] for e in S]
            w = max(w, max(ss) - min(ss))
        return w

    @property
    def nsec(self) -> int:
        return self.n

    def coords(self, e):
        # e = s*u + r*v; det(u, v) = 1
        (ux, uy), (vx, vy) = self.u, self.v
        x, y = e
        s = x * vy - y * vx
        r = -x * uy + y * ux
        return s, r

    def to_cell(self, e):
        s, r = self.coords(e)
        return (s, r % self.n)

    def from_cell(self, s, t):
        (ux, uy), (vx, vy) = self.u, self.v
        return (s * ux + t * vx, s * uy + t * vy)


def _ext_gcd(a, b):
    if b == 0:
        return a, 1, 0
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


@dataclass
class TransferGraph:
    """Edges between L-blocks of sections, restricted to essential states."""

    X: SftSpec
    frame: object
    L: int
    states: list
    edges: list
    essential: list = field(default_factory=list)

    @property
    def nsec(self):
        return self.frame.nsec

    def matrix(self, essential: bool = True):
        keep = self.essential if essential else list(range(len(self.states)))
        pos = {s: i for i, s in enumerate(keep)}
        rows, cols = [], []
        for a, b in self.edges:
            if a in pos and b in pos:
                rows.append(pos[a])
                cols.append(pos[b])
        n = len(keep)
        return csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n, n))


def block_width(X: SftSpec, frame) -> int:
    w = 0
    for S, _ in X.clause_groups():
        ss = [frame.to_cell(e)[0] for e in S]
        w = max(w, max(ss) - min(ss))
    return max(w, 1)


def _block_compiled(X: SftSpec, frame, nblocks: int):
    """Compiled constraints on nblocks consecutive sections (section-major order)."""
    g = X.group
    cells = [frame.from_cell(s, t) for s in range(nblocks) for t in range(frame.nsec)]
    key = {frame.to_cell(c): i for i, c in enumerate(cells)}
    placements = []
    for gid, (S, _) in enumerate(X.clause_groups()):
        sc = [frame.to_cell(e) for e in S]
        smin = min(s for s, _ in sc)
        smax = max(s for s, _ in sc)
        for a in range(-smin, nblocks - smax):
            for t in range(frame.nsec):
                v = frame.from_cell(a, t)
                idx = tuple(key[frame.to_cell(g.add(v, e))] for e in S)
                placements.append((gid, idx))
    from .patterns import Compiled
    return Compiled(X, cells, placements)


def build_transfer(X: SftSpec, frame=None, budget: int = DEFAULT_BUDGET) -> TransferGraph:
    if frame is None:
        frame = LineFrame(X.group)
    cache_key = ("transfer", getattr(frame, "v", None), getattr(frame, "n", None))
    if cache_key in X._cache:
        return X._cache[cache_key]
    L = block_width(X, frame)
    m = frame.nsec
    comp = _block_compiled(X, frame, L + 1)
    rows = comp.enumerate(budget=budget)
    index: dict = {}
    states = []
    edges = []
    for r in rows:
        r = bytes(r.astype(np.int8))
        a, b = r[: L * m], r[m:]
        for s in (a, b):
            if s not in index:
                index[s] = len(states)
                states.append(s)
        edges.append((index[a], index[b]))
    ess = _trim(len(states), edges)
    tg = TransferGraph(X, frame, L, states, edges, ess)
    X._cache[cache_key] = tg
    return tg


def _trim(n: int, edges: list) -> list:
    """States lying on bi-infinite paths."""
    outs = [set() for _ in range(n)]
    ins = [set() for _ in range(n)]
    for a, b in edges:
        outs[a].add(b)
        ins[b].add(a)
    alive = [True] * n
    stack = [i for i in range(n) if not outs[i] or not ins[i]]
    while stack:
        i = stack.pop()
        if not alive[i]:
            continue
        alive[i] = False
        for j in outs[i]:
            ins[j].discard(i)
            if alive[j] and not ins[j]:
                stack.append(j)
        for j in ins[i]:
            outs[j].discard(i)
            if alive[j] and not outs[j]:
                stack.append(j)
    return [i for i in range(n) if alive[i]]


# ----------------------------------------------------------------------------
# certified spectral radius


@dataclass(frozen=True)
class Enclosure:
    lo: Fraction
    hi: Fraction

    @property
    def mid(self) -> float:
        return float((self.lo + self.hi) / 2)


def _component_bounds(A: csr_matrix) -> Enclosure:
    """Collatz-Wielandt enclosure of the spectral radius of an irreducible A."""
    n = A.shape[0]
    if n == 1:
        v = Fraction(int(A[0, 0]))
        return Enclosure(v, v)
    dense = A.toarray().astype(float)
    if n <= 400:
        w, V = np.linalg.eig(dense)
        k = int(np.argmax(w.real))
        x = np.abs(V[:, k].real)
    else:
        from scipy.sparse.linalg import eigs
        w, V = eigs(A.astype(float), k=1, which="LR")
        x = np.abs(V[:, 0].real)
    x = x / x.max()
    A_int = A.tocsr()
    best = None
    for _ in range(60):
        x = np.maximum(x, 1e-300)
        xs = [Fraction(float(t)) for t in x]
        lo = hi = None
        for i in range(n):
            start, end = A_int.indptr[i], A_int.indptr[i + 1]
            acc = Fraction(0)
            for j, a in zip(A_int.indices[start:end], A_int.data[start:end]):
                acc += int(a) * xs[j]
            r = acc / xs[i]
            lo = r if lo is None or r < lo else lo
            hi = r if hi is None or r > hi else hi
        enc = Enclosure(lo, hi)
        if best is None or enc.hi - enc.lo < best.hi - best.lo:
            best = enc
        if best.hi - best.lo <= Fraction(1, 10 ** 13) * max(best.hi, 1):
            break
        # smooth with the aperiodic matrix (A + I)/2, same Perron vector
        y = (dense @ x + x) / 2
        x = y / y.max()
    return best


def spectral_radius(A: csr_matrix) -> Enclosure:
    """Certified enclosure of the Perron root of a nonnegative integer matrix."""
    n = A.shape[0]
    if n == 0:
        return Enclosure(Fraction(0), Fraction(0))
    ncomp, labels = connected_components(A, directed=True, connection="strong")
    lo = hi = Fraction(0)
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        sub = A[idx][:, idx]
        if sub.nnz == 0:
            continue
        enc = _component_bounds(sub)
        lo = max(lo, enc.lo)
        hi = max(hi, enc.hi)
    return Enclosure(lo, hi)


# ----------------------------------------------------------------------------
# exact 1D language


def exact_language_rows(X: SftSpec, cells, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Globally admissible patterns of a rank-1 SFT on the given cells."""
    frame = LineFrame(X.group)
    if not cells:
        tg = build_transfer(X, frame)
        return np.zeros((1 if tg.essential else 0, 0), dtype=np.int8)
    tg = build_transfer(X, frame, budget)
    m = frame.nsec
    L = tg.L
    s_lo = min(c[0] for c in cells)
    s_hi = max(c[0] for c in cells)
    length = s_hi - s_lo + 1
    ess = set(tg.essential)
    words = set()
    if length <= L:
        for i in ess:
            words.add(tg.states[i][: length * m])
    else:
        succ: dict = {}
        for a, b in tg.edges:
            if a in ess and b in ess:
                succ.setdefault(a, []).append(b)
        steps = length - L
        frontier = {i: {tg.states[i]} for i in ess}
        # extend words forward step by step, tracking the last state
        cur = {(tg.states[i], i) for i in ess}
        for _ in range(steps):
            nxt = set()
            for w, i in cur:
                for j in succ.get(i, ()):
                    nxt.add((w + tg.states[j][-m:], j))
            cur = nxt
            if len(cur) > budget:
                raise BudgetError("exact language exceeds the budget")
        words = {w for w, _ in cur}
        del frontier
    pos = [(c[0] - s_lo) * m + frame._tidx[tuple(c[1:])] for c in cells]
    if not words:
        return np.zeros((0, len(cells)), dtype=np.int8)
    arr = np.frombuffer(b"".join(sorted(words)), dtype=np.int8).reshape(len(words), -1)
    out = np.unique(arr[:, pos], axis=0)
    return out
