"""Disjointified truncated Voronoi tilings and tiling diagnostics.

Distances are sqrt(free distance^2) + delta with exact comparisons. Ties
between nearest centers go to the center c with the least (site - c) in
the canonical order. A site belongs to a tile when its free distance to the
winning center is at most R, i.e. it lies in c + B_R.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .group import GroupSpec, fset, k_boundary


@dataclass
class PartialTiling:
    """Pairwise disjoint finite tiles, optionally pointed by centers."""

    tiles: list
    centers: list | None = None

    def union(self) -> set:
        out = set()
        for t in self.tiles:
            out.update(t)
        return out

    def tile_of(self) -> dict:
        return {e: i for i, t in enumerate(self.tiles) for e in t}

    def is_disjoint(self) -> bool:
        seen = set()
        for t in self.tiles:
            for e in t:
                if e in seen:
                    return False
                seen.add(e)
        return True

    def translate(self, v, spec: GroupSpec) -> "PartialTiling":
        tiles = [spec.translate(t, v) for t in self.tiles]
        centers = None if self.centers is None else [spec.add(c, v) for c in self.centers]
        return PartialTiling(tiles, centers)

    def canonical(self) -> list:
        if self.centers is None:
            return sorted(tuple(t) for t in self.tiles)
        return sorted((c, tuple(t)) for c, t in zip(self.centers, self.tiles))

    def as_json(self) -> list:
        out = []
        for i, t in enumerate(self.tiles):
            row = {"tile": [list(e) for e in t]}
            if self.centers is not None:
                row["center"] = list(self.centers[i])
            out.append(row)
        return out


def free_ball(r2: int, spec: GroupSpec) -> tuple:
    """B_R for R^2 = r2: free vectors of squared norm at most r2, times G."""
    r = math.isqrt(max(r2, 0))
    out = []
    for f in itertools.product(range(-r, r + 1), repeat=spec.rank):
        if sum(x * x for x in f) <= r2:
            for t in spec.torsion_elements():
                out.append(f + t)
    return fset(out)


def _as_array(elems, k):
    if not elems:
        return np.zeros((0, k), dtype=np.int64)
    return np.asarray(elems, dtype=np.int64).reshape(len(elems), k)


def assign_sites(sites, centers, r2: int, spec: GroupSpec) -> list:
    """Winning center index per site, or -1 when outside the truncation."""
    k = spec.ncoords
    out = kernels.voronoi_assign(_as_array(list(sites), k), _as_array(list(centers), k),
                                 spec.rank, list(spec.moduli), int(r2))
    return [int(x) for x in out]


def disjointified_voronoi(centers, r2: int, spec: GroupSpec, region=None) -> PartialTiling:
    """Tiles of the disjointified R-truncated Voronoi diagram (R^2 = r2).

    With ``region`` given, only sites in it are assigned (the centers are
    still all used), which is how periodic center sets are handled.
    """
    centers = fset(spec.reduce(tuple(c)) for c in centers)
    ball = free_ball(r2, spec)
    if region is None:
        region = spec.minkowski(centers, ball)
    region = fset(region)
    win = assign_sites(region, centers, r2, spec)
    tiles = [[] for _ in centers]
    for s, w in zip(region, win):
        if w >= 0:
            tiles[w].append(s)
    return PartialTiling([tuple(t) for t in tiles], list(centers))


def truncated_cells(centers, r2: int, spec: GroupSpec) -> list:
    """Plain truncated cells V_R(c, C), overlapping on ties; reference implementation."""
    from .group import metric
    centers = fset(centers)
    ball = free_ball(r2, spec)
    region = spec.minkowski(centers, ball)
    cells = [[] for _ in centers]
    for s in region:
        ds = [metric(s, c, spec) for c in centers]
        m = min(ds)
        for i, (c, d) in enumerate(zip(centers, ds)):
            fd = sum((a - b) ** 2 for a, b in zip(s[:spec.rank], c[:spec.rank]))
            if d == m and fd <= r2:
                cells[i].append(s)
    return [tuple(c) for c in cells]


# ----------------------------------------------------------------------------
# diagnostics


def exterior_boundary(W, T, union: set, spec: GroupSpec) -> tuple:
    """Sites v with v+W meeting T and v+W not inside the union of tiles."""
    W = fset(W)
    Ts = set(T)
    out = []
    for v in spec.difference(Ts, W):
        cells = [spec.add(v, w) for w in W]
        if any(c in Ts for c in cells) and not all(c in union for c in cells):
            out.append(v)
    return fset(out)


def _hull(points):
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _in_hull(p, hull) -> bool:
    n = len(hull)
    if n == 1:
        return tuple(p) == tuple(hull[0])
    if n == 2:
        (ax, ay), (bx, by) = hull
        cr = (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax)
        return cr == 0 and min(ax, bx) <= p[0] <= max(ax, bx) and min(ay, by) <= p[1] <= max(ay, by)
    for i in range(n):
        a, b = hull[i], hull[(i + 1) % n]
        if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) < 0:
            return False
    return True


def is_convex(T, spec: GroupSpec) -> bool:
    """T equals (lattice points of a convex set) x G."""
    d = spec.rank
    proj = {e[:d] for e in T}
    G = spec.torsion_elements()
    if len(T) != len(proj) * len(G):
        return False
    if set(T) != {f + t for f in proj for t in G}:
        return False
    if d == 0 or not proj:
        return True
    if d == 1:
        xs = sorted(p[0] for p in proj)
        return xs[-1] - xs[0] + 1 == len(xs)
    if d == 2:
        hull = _hull(proj)
        xs = [p[0] for p in proj]
        ys = [p[1] for p in proj]
        for x in range(min(xs), max(xs) + 1):
            for y in range(min(ys), max(ys) + 1):
                if (x, y) not in proj and _in_hull((x, y), hull):
                    return False
        return True
    raise NotImplementedError("convexity check supports rank at most 2")


def tiling_diagnostics(tau: PartialTiling, K, W, eps, eps1, spec: GroupSpec,
                       r2: int | None = None, view=None) -> dict:
    """Per-tile invariance and exterior-boundary checks plus tiling-level checks.

    ``view`` restricts the per-tile checks to tiles meeting it (used for
    tilings cut out of infinite periodic ones).
    """
    eps = Fraction(eps)
    eps1 = Fraction(eps1)
    union = tau.union()
    rows = []
    view_set = None if view is None else set(view)
    for i, T in enumerate(tau.tiles):
        if not T:
            continue
        if view_set is not None and view_set.isdisjoint(T):
            continue
        bK = len(k_boundary(K, T, spec))
        bW = len(exterior_boundary(W, T, union, spec))
        row = {"tile": i, "size": len(T), "k_boundary": bK, "ext_boundary": bW,
               "invariant": bK < eps * len(T), "small_exterior": bW <= eps1 * len(T)}
        if tau.centers is not None:
            row["center"] = list(tau.centers[i])
        rows.append(row)
    report = {
        "tiles": rows,
        "disjoint": tau.is_disjoint(),
        "all_invariant": all(r["invariant"] for r in rows),
        "all_small_exterior": all(r["small_exterior"] for r in rows),
    }
    if tau.centers is not None:
        report["centers_inside"] = all(c in set(T) for c, T in zip(tau.centers, tau.tiles) if T)
        if r2 is not None and view is None:
            need = spec.minkowski(tau.centers, free_ball(r2, spec))
            report["coverage"] = set(need) <= union
        d = spec.rank
        frees = [c[:d] for c in tau.centers]
        if len(set(frees)) == len(frees):
            report["convex"] = all(is_convex(T, spec) for T in tau.tiles if T)
    return report
