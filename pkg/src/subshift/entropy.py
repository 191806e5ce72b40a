"""Entropy bounds and exact values, least-period tables."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .group import GroupError, make_box, make_interval_box
from .patterns import DEFAULT_BUDGET, SftSpec, compile_domain, count_local, language_rows
from .transfer import LineFrame, StripFrame, build_transfer, spectral_radius

NEG_INF = float("-inf")


@dataclass
class EntropyEstimate:
    """Entropy enclosure ``lower <= h <= upper`` with a method tag."""

    lower: float
    upper: float
    method: str
    params: dict = field(default_factory=dict)
    exact: bool = False

    @property
    def value(self) -> float:
        if self.lower == self.upper:
            return self.lower
        return 0.5 * (self.lower + self.upper)

    def as_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "method": self.method,
                "exact": self.exact, "params": dict(self.params)}


def _log(x) -> float:
    return math.log(x) if x > 0 else NEG_INF


def entropy_upper_bound(X: SftSpec, F=None, box: int | None = None,
                        budget: int = DEFAULT_BUDGET) -> EntropyEstimate:
    """(1/|F|) ln |L_F(X)|, an upper bound on h(X).

    Counts come from the exact language when one is available and from the
    locally admissible superset otherwise; both give valid upper bounds.
    """
    if F is None:
        F = make_box(box or 1, X.group)
    F = tuple(F)
    if X.rank == 2:
        n = count_local(X, F)
        exact = False
    else:
        _, rows, exact = language_rows(X, F, budget)
        n = rows.shape[0]
    h = _log(n) / len(F) if n else NEG_INF
    lower = NEG_INF
    if X.rank == 0:
        lower = h
    return EntropyEstimate(lower, h, "BOX-UPPER",
                           {"cells": len(F), "count": n, "language": "EXACT" if exact else "LOCAL-UPPER"})


def _radius_entropy(X: SftSpec, frame, method: str, params: dict) -> EntropyEstimate:
    tg = build_transfer(X, frame)
    A = tg.matrix()
    if A.shape[0] == 0:
        return EntropyEstimate(NEG_INF, NEG_INF, method, params, exact=True)
    enc = spectral_radius(A)
    m = frame.nsec
    lo = _log(enc.lo) / m
    hi = _log(enc.hi) / m
    params = dict(params, states=A.shape[0], rho_lower=float(enc.lo), rho_upper=float(enc.hi))
    return EntropyEstimate(lo, hi, method, params, exact=True)


def entropy_exact_1d(X: SftSpec) -> EntropyEstimate:
    """Entropy of a rank-1 SFT from its trimmed transfer graph.

    Normalized per site, so a nontrivial torsion part G divides by |G|.
    Returns ``-inf`` for the empty subshift.
    """
    if X.rank != 1:
        raise GroupError("entropy_exact_1d needs rank 1")
    return _radius_entropy(X, LineFrame(X.group), "TRANSFER-EXACT", {})


def block_entropy_lower(X: SftSpec, n: int, filler: int | None = None) -> EntropyEstimate:
    """Lower bound from n-boxes separated by gaps of a filler symbol.

    Let e_i be the extent of the window in free coordinate i. Count the
    n-box patterns that stay locally admissible inside the box padded by
    e_i filler cells on each side. Laying such boxes on the lattice with
    period n + e_i and filling the gaps gives points of X, since every
    window translate meets at most one box. Hence
    h(X) >= ln N / ((n + e_1) ... (n + e_d) |G|).
    The filler defaults to the symbol giving the largest count.
    """
    g = X.group
    d = g.rank
    ext = [max(w[i] for w in X.window) - min(w[i] for w in X.window) for i in range(d)]
    inner = set(make_interval_box([0] * d, [n - 1] * d, g))
    padded = make_interval_box([-e for e in ext], [n - 1 + e for e in ext], g)
    comp = compile_domain(X, padded)
    full = (1 << X.q) - 1
    best, best_a = 0, None
    for a in ([filler] if filler is not None else range(X.q)):
        all_a = [1 << a] * len(padded)
        if not comp.exists(all_a):
            continue
        doms = [full if e in inner else 1 << a for e in padded]
        c = comp.count(doms)
        if c > best:
            best, best_a = c, a
    period = g.torsion_order
    for e in ext:
        period *= n + e
    lo = _log(best) / period if best else NEG_INF
    return EntropyEstimate(lo, float("inf"), "BLOCK-LOWER",
                           {"n": n, "filler": best_a, "count": best, "period_cells": period})


def strip_entropy(X: SftSpec, v, n: int) -> EntropyEstimate:
    """Per-site entropy of the Z x Z/n system of <n v>-periodic points of a Z^2-SFT."""
    frame = StripFrame(X.group, v, n, X)
    return _radius_entropy(X, frame, "STRIP-EXACT", {"v": list(frame.v), "n": n, "u": list(frame.u)})


def trace_powers(X: SftSpec, N: int, frame=None) -> list:
    """Exact tr(M^n) for n = 1..N with M the trimmed transfer matrix."""
    tg = build_transfer(X, frame or LineFrame(X.group))
    A = tg.matrix().toarray().astype(object)
    if A.shape[0] == 0:
        return [0] * N
    out = []
    P = A.copy()
    for _ in range(N):
        out.append(int(sum(P[i, i] for i in range(P.shape[0]))))
        P = P.dot(A)
    return out


def sieve_least_periods(fixed: list) -> list:
    """Least-period counts from fixed-point counts: q_n = p_n - sum_{d|n, d<n} q_d."""
    q = []
    for n in range(1, len(fixed) + 1):
        v = fixed[n - 1] - sum(q[d - 1] for d in range(1, n) if n % d == 0)
        q.append(v)
    return q


def least_period_counts(X: SftSpec, N: int) -> list:
    """Number of points of least period n (n = 1..N) of a rank-1 SFT."""
    if X.rank != 1:
        raise GroupError("least_period_counts needs rank 1")
    return sieve_least_periods(trace_powers(X, N))


def fullshift_least_periods(b: int, N: int) -> list:
    return sieve_least_periods([b ** n for n in range(1, N + 1)])
