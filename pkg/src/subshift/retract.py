"""Retractions onto SFTs, G-freeness witnesses, padded extensions and homotopy checks."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .group import GroupSpec, fset, make_interval_box
from .markers import MarkerSet, marker_lemma
from .clopen import ClopenSet
from .patterns import (
    Pattern, SftSpec, SlidingBlockCode, compile_domain, is_locally_admissible, is_safe_symbol,
    language_rows, local_language_rows, violations,
)
from .subgroups import INFINITE, Subgroup, enumerate_subgroups

__all__ = [
    "is_safe_symbol", "safe_symbol_retract", "coloring_shift", "coloring_retract",
    "ColoringRetract", "gfree_witness", "GFreeResult", "build_padded", "verify_homotopy",
    "HomotopyReport", "squig_check", "RetractError",
]


class RetractError(ValueError):
    def __init__(self, msg: str, witness: dict | None = None):
        super().__init__(msg)
        self.witness = witness or {}


def _placements(X: SftSpec):
    """(clause, offset) pairs; clause c placed at v covers v + supp(c)."""
    return [(c, s) for c in X.clauses for s in c.support]


def safe_symbol_retract(X: SftSpec, p: Pattern, a) -> tuple:
    """Write ``a`` on every site covered by a forbidden occurrence.

    Returns ``(pattern, omitted)``: the output on sites whose covering
    placements all lie inside the support of p, and the remaining sites.
    """
    g = X.group
    if isinstance(a, str):
        a = X.symbol_index(a)
    if not is_safe_symbol(X, a):
        raise RetractError(f"symbol {X.alphabet[a]} is not certified safe")
    d = p.as_dict()
    out, omitted = {}, []
    for v in p.support:
        hit = False
        ok = True
        for c, s in _placements(X):
            base = g.sub(v, s)
            cells = [g.add(base, t) for t in c.support]
            if any(e not in d for e in cells):
                ok = False
                break
            if not hit and all(d[e] == x for e, x in zip(cells, c.values)):
                hit = True
        if ok:
            out[v] = a if hit else d[v]
        else:
            omitted.append(v)
    return Pattern.from_mapping(out), tuple(omitted)


# ----------------------------------------------------------------------------
# proper colorings


def coloring_shift(k: int, F, spec: GroupSpec) -> SftSpec:
    """X_(k,F): maps to {1..k} with x_v != x_(v+f) for f in F."""
    F = fset(spec.reduce(tuple(f)) for f in F)
    if spec.zero() in F:
        raise ValueError("F must not contain 0")
    alphabet = [str(i) for i in range(1, k + 1)]
    window = fset(set(F) | {spec.zero()})
    clauses = [Pattern.from_mapping({spec.zero(): c, f: c}) for f in F for c in range(k)]
    return SftSpec(spec, alphabet, window, clauses)


@dataclass
class ColoringRetract:
    """The retraction r: X -> X_(k,F) built from a marker set for P = F."""

    X: SftSpec
    k: int
    F: tuple
    markers: MarkerSet

    @property
    def target(self) -> SftSpec:
        return coloring_shift(self.k, self.F, self.X.group)

    def apply(self, p: Pattern) -> tuple:
        """``(pattern, omitted)`` with the output on sites with enough context."""
        g = self.X.group
        d = p.as_dict()
        ev = self.markers.evaluator(d.get)
        order = fset(set(self.F) | {g.zero()})
        sites = p.support
        t = {}
        for v in sites:
            tv = None
            for j, f in enumerate(order):
                a = ev.alpha(g.add(v, f))
                if a is None:
                    break
                if a == 1:
                    tv = j
                    break
            else:
                raise RetractError(f"site {v} is not covered by the marker set", {"site": v})
            t[v] = tv
        val = {v: d[v] for v in sites}
        ok = {v: t[v] is not None for v in sites}
        colors = set(range(self.k))
        for j in range(len(order)):
            new_val, new_ok = dict(val), dict(ok)
            for v in sites:
                if t[v] != j:
                    continue
                nb = [g.add(v, f) for f in self.F]
                if not all(u in val and ok[u] for u in nb):
                    new_ok[v] = False
                    continue
                B = {val[u] for u in nb}
                if val[v] in B:
                    new_val[v] = min(colors - B)
            val, ok = new_val, new_ok
        out = {v: val[v] for v in sites if ok[v]}
        return Pattern.from_mapping(out), tuple(v for v in sites if not ok[v])


def coloring_retract(k: int, F, X: SftSpec, max_k: int = 4) -> ColoringRetract:
    """Retraction onto X_(k,F) for k > |F| and an X without F-periodic points.

    t(v) is the least index j (F u {0} in canonical order) with alpha = 1
    at v + v_j; pass j recolors every site with t = j whose color clashes
    with a neighbour, using the least free color.
    """
    g = X.group
    F = fset(g.reduce(tuple(f)) for f in F)
    if k <= len(F):
        raise RetractError(f"need k > |F| = {len(F)}")
    if X.q != k:
        raise RetractError("X must use the alphabet of X_(k,F)")
    if not g.is_symmetric(F):
        raise RetractError("F must be symmetric")
    M = marker_lemma(X, ClopenSet.whole(X), F, max_k=max_k)
    return ColoringRetract(X, k, F, M)


# ----------------------------------------------------------------------------
# G-freeness


@dataclass
class GFreeResult:
    verdict: str                # "WITNESS", "COUNTEREXAMPLE" or "INCONCLUSIVE"
    window: tuple | None = None
    counterexample: dict = field(default_factory=dict)
    exact: bool = True


def _anchored_box(k: int, spec: GroupSpec) -> tuple:
    return make_interval_box([0] * spec.rank, [k - 1] * spec.rank, spec)


def _periodic_in(X: SftSpec, sub: Subgroup, bound: int):
    """A point of X fixed by ``sub``, over finite-index overgroups of small index."""
    from .periodic import torus_rows
    spec = X.group
    gens = [spec.reduce(r) for r in sub.rows]
    for s in enumerate_subgroups(bound, spec):
        if not all(s.contains(h) for h in gens):
            continue
        dom, rows = torus_rows(X, s)
        if rows.shape[0]:
            return {"subgroup": s.generators_text(), "domain": [list(c) for c in dom],
                    "point": [int(v) for v in rows[0]]}
    return None


def gfree_witness(X: SftSpec, family, max_window: int = 6, period_bound: int | None = None) -> GFreeResult:
    """Smallest anchored box K on which every admissible pattern breaks every member of the family.

    ``family`` is a list of ``(subgroup, generators)``. A pattern w breaks
    Gamma0 when w_u != w_(u+h) for some generator h and u, u+h in K. A
    periodic point of X fixed by a member is reported as a counterexample.
    """
    spec = X.group
    family = [(s, [spec.reduce(tuple(h)) for h in gens]) for s, gens in family]
    if period_bound is None:
        period_bound = 6 if spec.rank <= 1 else 4
    if spec.rank <= 2:
        for s, _ in family:
            pt = _periodic_in(X, s, period_bound)
            if pt is not None:
                return GFreeResult("COUNTEREXAMPLE", None, pt, True)
    last = None
    exact = True
    for k in range(1, max_window + 1):
        K = _anchored_box(k, spec)
        cells, rows, ex = language_rows(X, K)
        exact = ex
        pos = {c: i for i, c in enumerate(cells)}
        unbroken = np.zeros(rows.shape[0], dtype=bool)
        for s, gens in family:
            broke = np.zeros(rows.shape[0], dtype=bool)
            for h in gens:
                for c in cells:
                    e = spec.add(c, h)
                    if e in pos:
                        broke |= rows[:, pos[c]] != rows[:, pos[e]]
            unbroken |= ~broke
        if not unbroken.any():
            return GFreeResult("WITNESS", K, {}, exact)
        last = {"window": [list(c) for c in cells],
                "pattern": [int(v) for v in rows[np.argmax(unbroken)]]}
    return GFreeResult("INCONCLUSIVE", None, last or {}, exact)


# ----------------------------------------------------------------------------
# padded extension


def build_padded(Y: SftSpec, K, D) -> SftSpec:
    """Y^(K,D): forbid (K+D)-patterns all of whose D-translated K-windows lie outside L_K(Y)."""
    g = Y.group
    K = fset(K)
    D = fset(D)
    KD = g.minkowski(K, D)
    _, lang, _ = language_rows(Y, K)
    good = {tuple(int(v) for v in r) for r in lang}
    pos = {c: i for i, c in enumerate(KD)}
    idx = [[pos[g.add(d, k)] for k in K] for d in D]
    clauses = []
    for vals in itertools.product(range(Y.q), repeat=len(KD)):
        if all(tuple(vals[i] for i in ix) not in good for ix in idx):
            clauses.append(Pattern(KD, vals))
    return SftSpec(g, Y.alphabet, KD, clauses)


# ----------------------------------------------------------------------------
# homotopy verification


@dataclass
class HomotopyReport:
    checks: dict
    counterexample: dict | None
    label: str = "verified at scale"

    @property
    def passed(self) -> bool:
        return all(v == "PASS" for v in self.checks.values())


def triple_index(z: int, a: int, b: int, q: int) -> int:
    return z * q * q + a * q + b


def _psi(psi: SlidingBlockCode, q: int, zs, ys0, ys1) -> int:
    return psi.lookup(tuple(triple_index(z, a, b, q) for z, a, b in zip(zs, ys0, ys1)))


def verify_homotopy(Y: SftSpec, psi: SlidingBlockCode, period_bound: int = 6) -> HomotopyReport:
    """Check a candidate psi: {0,1} x Y x Y -> Y for the homotopy equations at finite scale.

    (a) images of admissible triple windows avoid the forbidden patterns of Y;
    (b) psi(0, y0, y1) = y0 and psi(1, y0, y1) = y1 on periodic points;
    (c) psi(z, y, y) = y for every z-window and periodic y.
    Symbol (z, a, b) is encoded as z*q*q + a*q + b.
    """
    g = Y.group
    q = Y.q
    W0 = psi.window
    checks = {}
    cex = None

    # (a)
    U = g.minkowski(Y.window, W0)
    cells, rows, _ = language_rows(Y, U)
    pos = {c: i for i, c in enumerate(cells)}
    found = None
    for zv in itertools.product((0, 1), repeat=len(cells)):
        for r0 in rows:
            for r1 in rows:
                out = {}
                for v in Y.window:
                    ix = [pos[g.add(v, w)] for w in W0]
                    out[v] = _psi(psi, q, [zv[i] for i in ix], [int(r0[i]) for i in ix],
                                  [int(r1[i]) for i in ix])
                img = Pattern.from_mapping(out)
                if violations(Y, img):
                    found = {"check": "a", "window": [list(c) for c in cells], "z": list(zv),
                             "y0": [int(v) for v in r0], "y1": [int(v) for v in r1],
                             "image": list(img.values), "image_window": [list(c) for c in img.support]}
                    break
            if found:
                break
        if found:
            break
    checks["a"] = "FAIL" if found else "PASS"
    cex = cex or found

    # (b), (c) on periodic points
    pts = _periodic_points(Y, period_bound)
    fb0 = fb1 = fc = None
    for sub, dom, rows_p in pts:
        P = {c: i for i, c in enumerate(dom)}
        look = [[P[sub.reduce(g.add(v, w))] for w in W0] for v in dom]
        for r0 in rows_p:
            for r1 in rows_p:
                for zc, tgt, name in ((0, r0, "b0"), (1, r1, "b1")):
                    if (name == "b0" and fb0) or (name == "b1" and fb1):
                        continue
                    for vi, ix in enumerate(look):
                        val = _psi(psi, q, [zc] * len(ix), [int(r0[i]) for i in ix],
                                   [int(r1[i]) for i in ix])
                        if val != int(tgt[vi]):
                            wit = {"check": name, "subgroup": sub.generators_text(),
                                   "y0": [int(v) for v in r0], "y1": [int(v) for v in r1],
                                   "site": list(dom[vi])}
                            if name == "b0":
                                fb0 = wit
                            else:
                                fb1 = wit
                            break
            if fc is None:
                for vi, ix in enumerate(look):
                    ys = [int(r0[i]) for i in ix]
                    for zv in itertools.product((0, 1), repeat=len(ix)):
                        if _psi(psi, q, zv, ys, ys) != int(r0[vi]):
                            fc = {"check": "c", "subgroup": sub.generators_text(),
                                  "y": [int(v) for v in r0], "z": list(zv), "site": list(dom[vi])}
                            break
                    if fc:
                        break
    checks["b0"] = "FAIL" if fb0 else "PASS"
    checks["b1"] = "FAIL" if fb1 else "PASS"
    checks["c"] = "FAIL" if fc else "PASS"
    cex = cex or fb0 or fb1 or fc
    return HomotopyReport(checks, cex)


def _periodic_points(Y: SftSpec, bound: int) -> list:
    from .periodic import torus_rows
    out = []
    for s in enumerate_subgroups(bound, Y.group):
        dom, rows = torus_rows(Y, s)
        out.append((s, dom, rows))
    return out


def squig_check(X: SftSpec, Y: SftSpec, max_index: int) -> dict:
    """Finite-index part of the stabilizer condition: X_[G0] nonempty implies Y_[G0] nonempty."""
    from .periodic import torus_count
    rows = []
    ok = True
    for s in enumerate_subgroups(max_index, X.group):
        nx = torus_count(X, s)
        ny = torus_count(Y, s)
        good = nx == 0 or ny > 0
        ok &= good
        rows.append({"subgroup": s.generators_text(), "index": s.index, "X": nx, "Y": ny,
                     "ok": good})
    return {"holds": ok, "rows": rows, "max_index": max_index}
