"""Embedding conditions into full shifts, finite conjugacy and a 1D embedding constructor."""
from __future__ import annotations

import itertools
import math
import random
from collections import defaultdict, deque
from dataclasses import dataclass, field

import numpy as np

from .entropy import (
    NEG_INF, EntropyEstimate, block_entropy_lower, entropy_exact_1d, entropy_upper_bound, fullshift_least_periods,
    least_period_counts, strip_entropy,
)
from .group import GroupError, make_interval_box
from .patterns import DEFAULT_BUDGET, Pattern, SftSpec, SlidingBlockCode, count_local, language_rows
from .periodic import (
    PeriodicPointSet, exact_stab_count, fullshift_exact_stab_count, stabilizer_of, torus_rows,
)
from .subgroups import Subgroup, enumerate_subgroups, overgroups
from .transfer import LineFrame, _trim, build_transfer, spectral_radius

ENTROPY_STRICT = "ENTROPY-STRICT"
CONJUGATE_FINITE = "CONJUGATE-FINITE"
CONJUGATE = "CONJUGATE"
UNDECIDED = "UNDECIDED"


class EmbedError(ValueError):
    def __init__(self, msg: str, report=None):
        super().__init__(msg)
        self.report = report


@dataclass
class ConditionRow:
    subgroup: str
    branch: str
    status: str                 # "PASS", "FAIL" or "UNDECIDED"
    evidence: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"subgroup": self.subgroup, "branch": self.branch, "status": self.status,
                "evidence": self.evidence}


@dataclass
class EmbedConditionReport:
    rows: list
    verdict: str                # "YES", "NO" or "INCONCLUSIVE"
    witness: ConditionRow | None = None
    bounds: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "rows": [r.as_dict() for r in self.rows],
                "witness": None if self.witness is None else self.witness.as_dict(),
                "bounds": dict(self.bounds)}


def _finish(rows: list, bounds: dict, extra_ok: bool = True) -> EmbedConditionReport:
    for r in rows:
        if r.status == "FAIL":
            return EmbedConditionReport(rows, "NO", r, bounds)
    if all(r.status == "PASS" for r in rows) and extra_ok:
        return EmbedConditionReport(rows, "YES", None, bounds)
    return EmbedConditionReport(rows, "INCONCLUSIVE", None, bounds)


def full_shift_size(X: SftSpec) -> int | None:
    """Number of symbols if X is visibly a full shift on its usable symbols, else None.

    Usable symbols are those not forbidden by a one-cell clause; X is a full
    shift on them when every other clause mentions an unusable symbol.
    """
    dead = {c.values[0] for c in X.clauses if len(c.support) == 1}
    live = set(range(X.q)) - dead
    if all(any(v not in live for v in c.values) for c in X.clauses):
        return len(live)
    return None


def _target_size(Y) -> int | None:
    if isinstance(Y, int):
        return Y
    return full_shift_size(Y)


def _entropy_row(name: str, est: EntropyEstimate, hy: EntropyEstimate, conj: bool) -> ConditionRow:
    ev = {"h_X": est.as_dict(), "h_Y": hy.as_dict()}
    if conj:
        return ConditionRow(name, CONJUGATE, "PASS", dict(ev, note="X and Y are the same full shift"))
    if est.upper < hy.lower:
        return ConditionRow(name, ENTROPY_STRICT, "PASS", ev)
    if est.lower > hy.upper:
        return ConditionRow(name, ENTROPY_STRICT, "FAIL", ev)
    return ConditionRow(name, UNDECIDED, "UNDECIDED", ev)


def _fullshift_entropy(b: int) -> EntropyEstimate:
    h = math.log(b) if b > 0 else NEG_INF
    return EntropyEstimate(h, h, "FULL-SHIFT", {"symbols": b}, exact=True)


# ----------------------------------------------------------------------------
# rank 1


def margin_n0(dim: int, lam: float, b: int, cap: int = 10_000) -> int | None:
    """Least n0 with dim (lam/b)^n + 2 b^(-n/2) <= 1 for all n >= n0, or None."""
    if lam >= b:
        return None
    for n in range(1, cap + 1):
        if dim * (lam / b) ** n + 2 * b ** (-n / 2) <= 1:
            return n
    return None


def krieger_check(X: SftSpec, Y, N: int) -> EmbedConditionReport:
    """Least-period and entropy conditions for embedding a 1D SFT into a full shift.

    Rows n <= N compare least-period counts. Beyond N (and up to the margin
    index n0) counts are compared exactly too; for n >= n0 the bound
    q_n(X) <= tr(M^n) <= dim lam^n < b^n - 2 b^(n/2) <= q_n(Y) holds with a
    certified Perron root lam.
    """
    if X.rank != 1 or X.group.torsion_order != 1:
        raise GroupError("krieger_check needs a subshift of Z")
    b = _target_size(Y)
    nx = full_shift_size(X)
    conj = b is not None and nx == b
    est = entropy_exact_1d(X)
    hy = _fullshift_entropy(b) if b is not None else entropy_exact_1d(Y)
    rows = [_entropy_row("0", est, hy, conj)]
    bounds = {"N": N, "target": "full shift" if b is not None else "SFT"}
    tg = build_transfer(X, LineFrame(X.group))
    dim = len(tg.essential)
    extra_ok = b is not None
    n_check = N
    if b is not None and not conj and est.upper < hy.lower:
        rho = spectral_radius(tg.matrix())
        n0 = margin_n0(dim, float(rho.hi) * (1 + 1e-12), b)
        bounds.update(margin_n0=n0, dim=dim, rho_upper=float(rho.hi))
        if n0 is None:
            extra_ok = False
        else:
            n_check = max(N, n0)
    qx = least_period_counts(X, n_check)
    qy = fullshift_least_periods(b, n_check) if b is not None else least_period_counts(Y, n_check)
    bounds["periods_checked"] = n_check
    for n in range(1, n_check + 1):
        a, c = qx[n - 1], qy[n - 1]
        branch = CONJUGATE_FINITE if a == c else ENTROPY_STRICT
        if conj:
            branch = CONJUGATE
        row = ConditionRow(f"{n}", branch, "PASS" if a <= c else "FAIL",
                           {"q_X": a, "q_Y": c})
        if n <= N or row.status == "FAIL":
            rows.append(row)
        if row.status == "FAIL":
            break
    if conj:
        extra_ok = True
    return _finish(rows, bounds, extra_ok)


# ----------------------------------------------------------------------------
# rank 2


def primitive_vectors(max_norm: float) -> list:
    """Primitive vectors of Z^2 up to sign with Euclidean norm at most max_norm."""
    r = int(math.floor(max_norm))
    out = []
    for a in range(0, r + 1):
        for c in range(-r, r + 1):
            if a * a + c * c > max_norm * max_norm or math.gcd(a, c) != 1:
                continue
            if a == 0 and c < 0:
                continue
            out.append((a, c))
    return sorted(out, key=lambda v: (v[0] ** 2 + v[1] ** 2, v))


def box_entropy_upper(X: SftSpec, budget: int = 2_000_000) -> EntropyEstimate:
    """Least box bound (1/n^2) ln |L_loc(n x n)| over boxes whose count fits the budget."""
    best = None
    prev = 1
    n = 1
    while True:
        if n > 1 and prev * X.q ** (2 * n - 1) > budget * X.q:
            break
        F = make_interval_box((0, 0), (n - 1, n - 1), X.group)
        est = entropy_upper_bound(X, F)
        prev = est.params["count"]
        if best is None or est.upper < best.upper:
            best = est
        n += 1
        if n > 12:
            break
    return best


def block_entropy_lower_best(X: SftSpec, budget: int = 2_000_000) -> EntropyEstimate:
    """Best :func:`block_entropy_lower` over boxes whose count stays within the budget."""
    best = None
    n = 1
    while n <= 12:
        est = block_entropy_lower(X, n)
        if best is None or est.lower > best.lower:
            best = est
        if est.params["count"] * X.q ** ((2 * n + 1) * X.group.torsion_order) > budget:
            break
        n += 1
    return best


def z2_fullshift_check(X: SftSpec, b: int, max_index: int, max_prim_norm: float,
                       max_n: int) -> EmbedConditionReport:
    """Finite battery of the conditions for embedding a Z^2-SFT into the full shift on b symbols."""
    spec = X.group
    if spec.rank != 2 or spec.torsion_order != 1:
        raise GroupError("z2_fullshift_check needs a subshift of Z^2")
    lnb = math.log(b)
    conj = full_shift_size(X) == b
    rows = []
    strips = [(v, n, strip_entropy(X, v, n))
              for v in primitive_vectors(max_prim_norm) for n in range(1, max_n + 1)]
    ub = box_entropy_upper(X)
    lb = block_entropy_lower_best(X)
    h = EntropyEstimate(lb.lower, ub.upper, "BOX-UPPER+BLOCK-LOWER",
                        {"box": ub.params, "block": lb.params})
    rows.append(_entropy_row("0", h, _fullshift_entropy(b), conj))
    for v, n, est in strips:
        name = f"<{n}*({v[0]},{v[1]})>"
        ev = {"h_strip": est.as_dict(), "h_Y": lnb}
        if conj:
            rows.append(ConditionRow(name, CONJUGATE, "PASS", ev))
        elif est.upper < lnb:
            rows.append(ConditionRow(name, ENTROPY_STRICT, "PASS", ev))
        elif est.lower > lnb:
            rows.append(ConditionRow(name, ENTROPY_STRICT, "FAIL", ev))
        else:
            rows.append(ConditionRow(name, UNDECIDED, "UNDECIDED", ev))
    memo_x: dict = {}
    memo_y: dict = {}
    for s in enumerate_subgroups(max_index, spec):
        nx = exact_stab_count(X, s, memo_x)
        ny = fullshift_exact_stab_count(b, s, memo_y)
        branch = CONJUGATE_FINITE if nx == ny else ENTROPY_STRICT
        rows.append(ConditionRow(s.generators_text(), branch, "PASS" if nx <= ny else "FAIL",
                                 {"index": s.index, "X": nx, "Y": ny}))
    bounds = {"max_index": max_index, "max_prim_norm": max_prim_norm, "max_n": max_n,
              "quantifiers": "finite battery: necessary-only for NO, sufficient-given-bounds for YES"}
    return _finish(rows, bounds)


def fullshift_partition_check(b: int, sub: Subgroup) -> bool:
    """b^index equals the sum of exact-stabilizer counts over sub and its overgroups."""
    memo: dict = {}
    total = fullshift_exact_stab_count(b, sub, memo)
    total += sum(fullshift_exact_stab_count(b, h, memo) for h in overgroups(sub))
    return total == b ** sub.index


# ----------------------------------------------------------------------------
# finite systems


def _translate(config: tuple, g, dom: tuple, pos: dict, sub: Subgroup) -> tuple:
    spec = sub.spec
    return tuple(config[pos[sub.reduce(spec.add(c, g))]] for c in dom)


def orbit_census(P: PeriodicPointSet) -> dict:
    """Orbits grouped by exact stabilizer: ``{stabilizer: [sorted orbit, ...]}``."""
    dom = P.domain
    pos = {c: i for i, c in enumerate(dom)}
    seen = set()
    out = defaultdict(list)
    for cfg in P.configs:
        if cfg in seen:
            continue
        orbit = sorted({_translate(cfg, g, dom, pos, P.subgroup) for g in dom})
        seen.update(orbit)
        out[stabilizer_of(orbit[0], dom, P.subgroup)].append(orbit)
    return out


def finite_conjugacy(P: PeriodicPointSet, Q: PeriodicPointSet) -> tuple:
    """``(conjugate, matching)``; the matching maps configs of P to configs of Q equivariantly."""
    if P.subgroup != Q.subgroup:
        raise GroupError("periodic point sets live over different subgroups")
    cp, cq = orbit_census(P), orbit_census(Q)
    if {k: len(v) for k, v in cp.items()} != {k: len(v) for k, v in cq.items()}:
        return False, None
    dom = P.domain
    pos = {c: i for i, c in enumerate(dom)}
    match = {}
    for stab in sorted(cp, key=lambda s: s.sort_key()):
        for op, oq in zip(sorted(cp[stab]), sorted(cq[stab])):
            p0, q0 = op[0], oq[0]
            for g in dom:
                match[_translate(p0, g, dom, pos, P.subgroup)] = _translate(q0, g, dom, pos, P.subgroup)
    return True, match


# ----------------------------------------------------------------------------
# injectivity


def _code_interval(phi: SlidingBlockCode) -> tuple:
    xs = [w[0] for w in phi.window]
    if xs != list(range(xs[0], xs[0] + len(xs))):
        raise EmbedError("code window must be an interval")
    return xs[0], len(xs)


def pair_graph(X: SftSpec, phi: SlidingBlockCode) -> dict:
    """Label product of the n-block graph of X; decides injectivity exactly.

    The code is injective on X iff every essential vertex (u, u') of the
    product has u = u'.
    """
    a, k = _code_interval(phi)
    span = max(w[0] for w in X.window)
    n = max(k, span + 1, 1)
    cells, rows, _ = language_rows(X, [(i,) for i in range(n + 1)])
    index: dict = {}
    verts = []
    edges = []
    for r in rows:
        r = tuple(int(v) for v in r)
        u, w = r[:n], r[1:]
        for s in (u, w):
            if s not in index:
                index[s] = len(verts)
                verts.append(s)
        edges.append((index[u], index[w]))
    label = [phi.lookup(v[:k]) for v in verts]
    by_label = defaultdict(list)
    for i, lab in enumerate(label):
        by_label[lab].append(i)
    succ = defaultdict(list)
    for u, w in edges:
        succ[u].append(w)
    pidx: dict = {}
    pverts = []
    pedges = []

    def pid(p):
        if p not in pidx:
            pidx[p] = len(pverts)
            pverts.append(p)
        return pidx[p]

    for grp in by_label.values():
        for u in grp:
            for u2 in grp:
                pid((u, u2))
    for (u, u2), i in list(pidx.items()):
        for w in succ[u]:
            for w2 in succ[u2]:
                if label[w] == label[w2]:
                    pedges.append((i, pid((w, w2))))
    ess = _trim(len(pverts), pedges)
    off = [i for i in ess if pverts[i][0] != pverts[i][1]]
    return {"n": n, "verts": verts, "pverts": pverts, "pedges": pedges, "essential": ess,
            "offdiag": off, "offset": a}


def _collision_witness(G: dict) -> dict:
    """Periodic colliding pair through an off-diagonal essential vertex when one exists."""
    ess = set(G["essential"])
    succ = defaultdict(list)
    for u, w in G["pedges"]:
        if u in ess and w in ess:
            succ[u].append(w)
    verts = G["verts"]
    for start in G["offdiag"]:
        prev = {start: None}
        dq = deque([start])
        found = None
        while dq and found is None:
            u = dq.popleft()
            for w in succ[u]:
                if w == start:
                    found = u
                    break
                if w not in prev:
                    prev[w] = u
                    dq.append(w)
        if found is None:
            continue
        path = [found]
        while path[-1] != start:
            path.append(prev[path[-1]])
        path.reverse()
        pv = G["pverts"]
        x = [verts[pv[i][0]][0] for i in path]
        y = [verts[pv[i][1]][0] for i in path]
        return {"kind": "periodic", "period": len(path), "x": x, "y": y}
    i = G["offdiag"][0]
    u, u2 = G["pverts"][i]
    return {"kind": "window", "x": list(verts[u]), "y": list(verts[u2])}


@dataclass
class InjectivityResult:
    injective: bool | None
    window: tuple | None
    counterexample: dict | None
    pairs_checked: int = 0
    patterns_checked: int = 0


def verify_injectivity(X: SftSpec, phi: SlidingBlockCode, max_window: int = 10) -> InjectivityResult:
    """Least W0 = {-j..j} on which images determine the center symbol, or a collision."""
    a, k = _code_interval(phi)
    W = phi.window
    total_pairs = 0
    total_pats = 0
    for j in range(max_window + 1):
        lo, hi = -j + a, j + a + k - 1
        cells, rows, _ = language_rows(X, [(i,) for i in range(lo, hi + 1)])
        c0 = -lo
        seen: dict = {}
        bad = None
        for r in rows:
            r = tuple(int(v) for v in r)
            img = tuple(phi.lookup(tuple(r[c0 + v + w[0]] for w in W)) for v in range(-j, j + 1))
            prev = seen.get(img)
            if prev is None:
                seen[img] = r
            elif prev[c0] != r[c0]:
                bad = (prev, r)
                break
        total_pats += rows.shape[0]
        total_pairs += len(seen)
        if bad is None:
            return InjectivityResult(True, tuple((i,) for i in range(-j, j + 1)), None,
                                     total_pairs, total_pats)
    G = pair_graph(X, phi)
    if G["offdiag"]:
        return InjectivityResult(False, None, _collision_witness(G), total_pairs, total_pats)
    return InjectivityResult(None, None, {"kind": "inconclusive", "max_window": max_window},
                             total_pairs, total_pats)


# ----------------------------------------------------------------------------
# constructor


@dataclass
class EmbeddingArtifact:
    code: SlidingBlockCode
    injectivity_window: tuple
    transcript: dict

    def as_dict(self) -> dict:
        return {
            "source": list(self.code.source), "target": list(self.code.target),
            "window": [list(w) for w in self.code.window],
            "table": sorted([list(k), v] for k, v in self.code.table.items()),
            "injectivity_window": [list(w) for w in self.injectivity_window],
            "transcript": self.transcript,
        }


def _least_period(word: tuple) -> int:
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word == word[p:] + word[:p]:
            return p
    return n


def periodic_certificate(X: SftSpec, phi: SlidingBlockCode, period_bound: int) -> dict:
    """Images of every point of least period <= period_bound; checks injectivity and stabilizers."""
    a, k = _code_interval(phi)
    images = {}
    ok = True
    npts = 0
    orbits = []
    for n in range(1, period_bound + 1):
        sub = Subgroup.from_generators([(n,)], X.group)
        dom, rows = torus_rows(X, sub)
        for r in rows:
            w = tuple(int(v) for v in r)
            if _least_period(w) != n:
                continue
            npts += 1
            img = tuple(phi.lookup(tuple(w[(i + t[0]) % n] for t in phi.window)) for i in range(n))
            p = _least_period(img)
            key = img[:p]
            if p != n or key in images:
                ok = False
            images[key] = w
            if w == min(w[i:] + w[:i] for i in range(n)):
                orbits.append({"x": list(w), "image": list(img)})
    return {"ok": ok, "points": npts, "orbits": orbits, "period_bound": period_bound}


def _relabel(X: SftSpec, b: int, target) -> SlidingBlockCode | None:
    _, rows, _ = language_rows(X, [(0,)])
    used = sorted({int(r[0]) for r in rows})
    if len(used) > b:
        return None
    table = {(s,): i for i, s in enumerate(used)}
    return SlidingBlockCode(X.group, X.alphabet, target, [(0,)], table)


def _block_search(X: SftSpec, b: int, target, rng: random.Random, max_block: int, iters: int):
    for k in range(1, max_block + 1):
        cells, rows, _ = language_rows(X, [(i,) for i in range(k)])
        blocks = [tuple(int(v) for v in r) for r in rows]
        if not blocks:
            return None
        for _restart in range(4):
            table = {blk: rng.randrange(b) for blk in blocks}

            def score(t):
                phi = SlidingBlockCode(X.group, X.alphabet, target, cells, t)
                return len(pair_graph(X, phi)["offdiag"])

            cur = score(table)
            for _ in range(iters):
                if cur == 0:
                    return SlidingBlockCode(X.group, X.alphabet, target, cells, table)
                blk = blocks[rng.randrange(len(blocks))]
                best_v, best_s = table[blk], cur
                for v in range(b):
                    if v == table[blk]:
                        continue
                    t2 = dict(table)
                    t2[blk] = v
                    s = score(t2)
                    if s < best_s or (s == best_s and rng.random() < 0.3):
                        best_v, best_s = v, s
                table[blk] = best_v
                cur = best_s
            if cur == 0:
                return SlidingBlockCode(X.group, X.alphabet, target, cells, table)
    return None


def construct_embedding_1d(X: SftSpec, b: int, period_bound: int = 8, seed: int = 0,
                           max_block: int = 3, iters: int = 200,
                           max_window: int = 10) -> EmbeddingArtifact:
    """Injective sliding block code X -> {0..b-1}^Z with a replayable certificate.

    Strategies, in order: an injective relabeling of the symbols in use,
    then a seeded local search over k-block codes scored by the exact
    product-graph test. Only codes whose certificate verifies are returned.
    """
    rep = krieger_check(X, b, period_bound)
    if rep.verdict != "YES":
        raise EmbedError(f"embedding conditions not established ({rep.verdict})", rep)
    target = [str(i) for i in range(b)]
    rng = random.Random(seed)
    phi = _relabel(X, b, target)
    strategy = "relabel"
    if phi is None:
        phi = _block_search(X, b, target, rng, max_block, iters)
        strategy = "block-search"
    if phi is None:
        raise EmbedError("no injective code found within the block and iteration caps", rep)
    G = pair_graph(X, phi)
    inj = verify_injectivity(X, phi, max_window)
    cert = periodic_certificate(X, phi, period_bound)
    if G["offdiag"] or not inj.injective or not cert["ok"]:
        raise EmbedError("candidate code failed verification", rep)
    transcript = {
        "strategy": strategy, "seed": seed,
        "product_graph": {"block_length": G["n"], "pair_states": len(G["pverts"]),
                          "essential": len(G["essential"]), "offdiag_essential": 0},
        "window_check": {"pairs": inj.pairs_checked, "patterns": inj.patterns_checked,
                         "window": [list(w) for w in inj.window]},
        "periodic": cert,
    }
    return EmbeddingArtifact(phi, inj.window, transcript)


def replay_certificate(X: SftSpec, art: EmbeddingArtifact, max_window: int = 10) -> dict:
    """Recompute the certificate of an artifact from its code alone."""
    phi = art.code
    inj = verify_injectivity(X, phi, max_window)
    cert = periodic_certificate(X, phi, art.transcript["periodic"]["period_bound"])
    G = pair_graph(X, phi)
    return {
        "window_check": {"pairs": inj.pairs_checked, "patterns": inj.patterns_checked,
                         "window": None if inj.window is None else [list(w) for w in inj.window]},
        "periodic": cert,
        "product_graph": {"block_length": G["n"], "pair_states": len(G["pverts"]),
                          "essential": len(G["essential"]), "offdiag_essential": len(G["offdiag"])},
    }
