"""Markers to pointed partial tilings on periodic configurations.

Given K, eps, a window W with a pattern family fam, and a periodic point x,
build alpha = indicator of a marker set inside the complement of the fam
cylinder, tile its support by a disjointified truncated Voronoi diagram and
check the three tiling properties on a finite view window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .clopen import ClopenSet
from .group import fset, free_norm2, k_boundary, make_box
from .markers import MarkerSet, marker_lemma
from .patterns import Pattern, SftSpec
from .subgroups import Subgroup
from .voronoi import PartialTiling, disjointified_voronoi, exterior_boundary


@dataclass
class PeriodicConfig:
    """A point of A^Gamma given by its values on a fundamental domain of ``subgroup``."""

    subgroup: Subgroup
    values: dict

    @classmethod
    def from_word(cls, word, spec) -> "PeriodicConfig":
        from .subgroups import Subgroup as S
        sub = S.from_generators([(len(word),)], spec)
        return cls(sub, {(i,): int(a) for i, a in enumerate(word)})

    def __call__(self, e) -> int:
        return self.values[self.subgroup.reduce(e)]

    def pattern(self, F) -> Pattern:
        return Pattern.from_mapping({e: self(e) for e in F})


@dataclass
class PipelineResult:
    alpha: Pattern
    tiling: PartialTiling
    P: tuple
    sep_radius: int
    r2: int
    markers: MarkerSet
    properties: dict
    diagnostics: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.properties.values())


def default_sep_radius(K, spec) -> int:
    """Radius r with B_r containing B_(2 max |k|) for k in K."""
    m = max((free_norm2(k, spec) for k in K), default=0)
    return math.isqrt(4 * m - 1) + 1 if m else 0


def fam_region(X: SftSpec, W, fam) -> ClopenSet:
    """Points whose W-pattern at 0 is not in ``fam``."""
    W = fset(W)
    bad = set()
    for p in fam:
        d = p.as_dict() if isinstance(p, Pattern) else dict(p)
        bad.add(tuple(d[w] for w in W))
    return ClopenSet.whole(X, W).difference(ClopenSet(X, W, bad))


def _pad(view, r: int, spec) -> tuple:
    return spec.minkowski(view, make_box(max(r, 0), spec))


def marker_tiling_pipeline(X: SftSpec, K, eps, W, eps1, fam, x: PeriodicConfig, view,
                           sep_radius: int | None = None, max_r2: int = 400) -> PipelineResult:
    """alpha and tau on ``view`` plus the three tiling properties.

    The separation set is F = B_r with r = ``sep_radius`` (derived from K
    when omitted) and P = (F+F) minus 0. R^2 starts at the largest squared
    norm in P and doubles until every property holds on the view or
    ``max_r2`` is passed; the last attempt is returned either way.
    """
    spec = X.group
    K = fset(K)
    W = fset(W)
    view = fset(view)
    eps = Fraction(eps)
    eps1 = Fraction(eps1)
    r = default_sep_radius(K, spec) if sep_radius is None else sep_radius
    F = make_box(r, spec)
    P = fset(e for e in spec.minkowski(F, F) if e != spec.zero())
    V = fam_region(X, W, fam)
    M = marker_lemma(X, V, P)
    ev = M.evaluator(x)
    bad_w = {tuple(d[w] for w in W) for d in (p.as_dict() for p in fam)}

    def in_fam(v) -> bool:
        return tuple(x(spec.add(v, w)) for w in W) in bad_w

    r2 = max([free_norm2(p, spec) for p in P] + [1])
    while True:
        R = math.isqrt(r2) + (0 if math.isqrt(r2) ** 2 == r2 else 1)
        wr = max((math.isqrt(free_norm2(w, spec)) + 1 for w in W), default=0)
        region = _pad(view, 2 * R + wr, spec)
        cand = _pad(view, 3 * R + wr, spec)
        centers = [v for v in cand if ev.alpha(v) == 1]
        tau = disjointified_voronoi(centers, r2, spec, region=region)
        keep = [i for i, T in enumerate(tau.tiles) if T and not set(T).isdisjoint(view)]
        tiles = PartialTiling([tau.tiles[i] for i in keep], [tau.centers[i] for i in keep])
        union = tau.union()
        vs = set(view)
        p1 = all(in_fam(v) for v in view if v not in union)
        p2 = True
        rows = []
        for c, T in zip(tiles.centers, tiles.tiles):
            Ts = set(T)
            if c in vs and (in_fam(c) or not all(spec.add(c, k) in Ts for k in K)):
                p2 = False
            bK = len(k_boundary(K, T, spec))
            bW = len(exterior_boundary(W, T, union, spec))
            rows.append({"center": list(c), "size": len(T), "k_boundary": bK, "ext_boundary": bW,
                         "invariant": bK < eps * len(T), "small_exterior": bW <= eps1 * len(T)})
        inv = all(rw["invariant"] for rw in rows)
        p3 = all(rw["small_exterior"] for rw in rows)
        props = {"uncovered_in_family": p1, "centers_inside": p2, "invariant": inv,
                 "small_exterior": p3}
        if all(props.values()) or 2 * r2 > max_r2:
            break
        r2 *= 2
    alpha = Pattern.from_mapping({v: ev.alpha(v) for v in view})
    view_tiles = PartialTiling([tuple(e for e in T if e in vs) for T in tiles.tiles], tiles.centers)
    return PipelineResult(alpha, view_tiles, P, r, r2, M, props, rows)
