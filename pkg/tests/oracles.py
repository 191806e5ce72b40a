"""Brute-force reference computations, written without the package internals."""
from __future__ import annotations

import itertools
import math

import numpy as np


def grid_independent_sets(n: int) -> int:
    """Independent sets of the n x n grid graph by bitmask enumeration."""
    cells = n * n
    count = 0
    for mask in range(1 << cells):
        ok = True
        for r in range(n):
            for c in range(n):
                if mask >> (r * n + c) & 1:
                    if c + 1 < n and mask >> (r * n + c + 1) & 1:
                        ok = False
                        break
                    if r + 1 < n and mask >> ((r + 1) * n + c) & 1:
                        ok = False
                        break
            if not ok:
                break
        count += ok
    return count


def perron_log(A) -> float:
    return math.log(max(abs(np.linalg.eigvals(np.asarray(A, dtype=float)))))


def words(q: int, n: int, forbidden: set) -> list:
    """Words of length n over range(q) avoiding the forbidden factors (tuples)."""
    out = []
    for w in itertools.product(range(q), repeat=n):
        if not any(w[i:i + len(f)] == f for f in forbidden for i in range(n - len(f) + 1)):
            out.append(w)
    return out


def cyclic_words(q: int, n: int, forbidden: set) -> list:
    """Words w of length n whose periodic extension avoids the forbidden factors."""
    m = max((len(f) for f in forbidden), default=1)
    out = []
    for w in itertools.product(range(q), repeat=n):
        ext = w * (1 + (m + n - 1) // n)
        if not any(ext[i:i + len(f)] == f for f in forbidden for i in range(n)):
            out.append(w)
    return out


def least_period(w: tuple) -> int:
    n = len(w)
    return next(p for p in range(1, n + 1) if n % p == 0 and w == w[p:] + w[:p])


def least_period_table(q: int, N: int, forbidden: set) -> list:
    return [sum(1 for w in cyclic_words(q, n, forbidden) if least_period(w) == n) for n in range(1, N + 1)]


# ----------------------------------------------------------------------------
# tori Z^2 / <(a,b),(0,d)>


def lattice_hnfs(n: int) -> list:
    """Upper triangular bases (a, b, d) of the index-n sublattices of Z^2."""
    return [(a, b, n // a) for a in range(1, n + 1) if n % a == 0 for b in range(n // a)]


def torus_reduce(x: int, y: int, a: int, b: int, d: int) -> tuple:
    k = x // a
    return x - k * a, (y - k * b) % d


def torus_census(a: int, b: int, d: int, allowed) -> tuple:
    """(all configurations, exact-stabilizer configurations) on the torus.

    ``allowed(cfg, at)`` receives a lookup ``at(x, y)`` and decides admissibility.
    """
    dom = [(i, j) for i in range(a) for j in range(d)]
    pos = {c: k for k, c in enumerate(dom)}
    total = exact = 0
    for vals in itertools.product((0, 1), repeat=len(dom)):
        def at(x, y, vals=vals):
            return vals[pos[torus_reduce(x, y, a, b, d)]]
        if not allowed(at):
            continue
        total += 1
        fixed_by_more = any(
            all(at(x + s, y + t) == at(x, y) for x, y in dom)
            for s, t in dom if (s, t) != (0, 0))
        exact += not fixed_by_more
    return total, exact


def hard_square_ok(at, a: int, d: int) -> bool:
    for x in range(a):
        for y in range(d):
            if at(x, y) and (at(x + 1, y) or at(x, y + 1)):
                return False
    return True


# ----------------------------------------------------------------------------
# Voronoi


def voronoi_oracle(centers: list, r2: int) -> dict:
    """site -> center of the tie-broken truncated Voronoi diagram in Z^d."""
    out = {}
    r = math.isqrt(r2)
    d = len(centers[0])
    for c in centers:
        for off in itertools.product(range(-r, r + 1), repeat=d):
            s = tuple(ci + oi for ci, oi in zip(c, off))
            if s in out:
                continue
            best = None
            for c2 in centers:
                sq = sum((x - y) ** 2 for x, y in zip(s, c2))
                diff = tuple(x - y for x, y in zip(s, c2))
                key = (sq, diff)
                if best is None or key < best[0]:
                    best = (key, c2)
            if best[0][0] <= r2:
                out[s] = best[1]
    return out


def lattice_convex(points) -> bool:
    """Every lattice point of the convex hull of a planar point set is in the set."""
    pts = set(points)
    if len(pts) <= 1:
        return True
    from scipy.spatial import ConvexHull, QhullError
    arr = np.array(sorted(pts), dtype=float)
    xs, ys = arr[:, 0], arr[:, 1]
    try:
        hull = ConvexHull(arr)
    except QhullError:
        # collinear: the set must be an unbroken lattice segment
        p0 = arr[0]
        direction = arr[-1] - p0
        g = math.gcd(int(direction[0]), int(direction[1]))
        step = direction / g
        return len(pts) == g + 1 and all(tuple(int(v) for v in p0 + k * step) in pts for k in range(g + 1))
    eq = hull.equations
    for x in range(int(xs.min()), int(xs.max()) + 1):
        for y in range(int(ys.min()), int(ys.max()) + 1):
            if (x, y) not in pts and np.all(eq[:, 0] * x + eq[:, 1] * y + eq[:, 2] <= 1e-9):
                return False
    return True
