"""Self-overlaps, randomized search for overlap-free patterns, and substitution at marks."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .group import fset, make_annulus, make_box, maximal_separated
from .patterns import (
    Pattern, SftSpec, is_locally_admissible, language_rows, local_language_rows, sample_pattern,
)


class SearchError(RuntimeError):
    def __init__(self, msg: str, attempts: int = 0):
        super().__init__(msg)
        self.attempts = attempts


def self_overlaps(w: Pattern, rng_set, spec) -> tuple:
    """Shifts v in ``rng_set`` with w_u = w_(u+v) wherever both sites lie in the support."""
    d = w.as_dict()
    out = []
    for v in fset(rng_set):
        ok = True
        for u, a in d.items():
            b = d.get(spec.add(u, v))
            if b is not None and b != a:
                ok = False
                break
        if ok:
            out.append(v)
    return tuple(out)


@dataclass
class OverlapFreeResult:
    pattern: Pattern
    attempts: int
    allowed: tuple
    block_radius: int


def find_overlap_free_pattern(Y: SftSpec, n: int, seed: int = 0, attempts: int = 200,
                              block_radius: int = 1, kernel=None) -> OverlapFreeResult:
    """Locally admissible Q_n-pattern whose self-overlaps in B_n lie in Ker(Y) u {0}.

    Random admissible B_m-blocks are planted on a separated net inside Q_n,
    the rest is completed by randomized backtracking, and every candidate is
    verified exhaustively over B_n.
    """
    spec = Y.group
    _, single, _ = language_rows(Y, [spec.zero()])
    if single.shape[0] <= 1:
        raise SearchError("Y has at most one symbol in use; every pattern overlaps everywhere", 0)
    if kernel is None:
        from .periodic import kernel_of
        kernel = [e.generator for e in kernel_of(Y, n).evidence if e.member]
    allowed = fset(set(kernel) | {spec.zero()})
    Q = make_annulus(n, spec)
    Qs = set(Q)
    B = make_box(n, spec)
    m = block_radius
    Bm = make_box(m, spec)
    net_dom = [v for v in Q if all(spec.add(v, b) in Qs for b in Bm)]
    net = maximal_separated(make_box(m + 1, spec), net_dom, spec) if net_dom else ()
    bcells, blocks = local_language_rows(Y, Bm)
    rng = random.Random(seed)
    for t in range(1, attempts + 1):
        fixed = {}
        for v in net:
            r = blocks[rng.randrange(blocks.shape[0])]
            for c, val in zip(bcells, r):
                fixed[spec.add(v, c)] = int(val)
        p = sample_pattern(Y, Q, rng, fixed=fixed, max_steps=200_000)
        if p is None:
            continue
        if not is_locally_admissible(Y, p):
            continue
        ov = self_overlaps(p, B, spec)
        if set(ov) <= set(allowed):
            return OverlapFreeResult(p, t, allowed, m)
    raise SearchError(f"no overlap-free pattern on Q_{n} after {attempts} attempts", attempts)


def verify_overlap_free(Y: SftSpec, p: Pattern, n: int, allowed) -> bool:
    """Brute-force verification on B_n, independent of the search."""
    spec = Y.group
    if tuple(p.support) != make_annulus(n, spec):
        return False
    if not is_locally_admissible(Y, p):
        return False
    d = p.as_dict()
    for v in make_box(n, spec):
        if v in set(allowed):
            continue
        if all(d.get(spec.add(u, v), a) == a for u, a in d.items()):
            return False
    return True


def occurrences(y: Pattern, w: Pattern, spec) -> list:
    """Translates v with y_(v+s) = w_s for every s in the support of w."""
    d = y.as_dict()
    s0 = w.support[0]
    out = []
    for e in y.support:
        v = spec.sub(e, s0)
        if all(d.get(spec.add(v, s)) == a for s, a in zip(w.support, w.values)):
            out.append(v)
    return sorted(out)


def substitute_at_marks(y: Pattern, z: Pattern, w_from: Pattern, w_to: Pattern, spec) -> Pattern:
    """Replace each occurrence of w_from at a position v with z_v = 1 by w_to."""
    if tuple(w_from.support) != tuple(w_to.support):
        raise ValueError("w_from and w_to must share their support")
    zd = z.as_dict()
    marked = [v for v in occurrences(y, w_from, spec) if zd.get(v, 0) == 1]
    used: set = set()
    out = y.as_dict()
    for v in marked:
        cells = [spec.add(v, s) for s in w_from.support]
        if used.intersection(cells):
            raise ValueError(f"marked occurrences overlap at {v}")
        used.update(cells)
        for c, a in zip(cells, w_to.values):
            out[c] = a
    return Pattern.from_mapping(out)
