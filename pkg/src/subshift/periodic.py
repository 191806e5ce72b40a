"""Periodic points over finite-index subgroups, exact stabilizers, kernels."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .group import GroupError, GroupSpec
from .patterns import DEFAULT_BUDGET, SftSpec, compile_domain, language_rows
from .subgroups import INFINITE, Subgroup, enumerate_subgroups, overgroups


@dataclass
class PeriodicPointSet:
    """Configurations on a fundamental domain of ``subgroup``.

    ``exact_stab`` distinguishes X_[G0] (False: all points fixed by G0)
    from X_G0 (True: stabilizer exactly G0).
    """

    subgroup: Subgroup
    exact_stab: bool
    domain: tuple
    configs: list = field(default_factory=list)

    def __len__(self):
        return len(self.configs)

    def value_at(self, config: tuple, e) -> int:
        return config[self._pos[self.subgroup.reduce(e)]]

    @property
    def _pos(self):
        if not hasattr(self, "_posd"):
            self._posd = {c: i for i, c in enumerate(self.domain)}
        return self._posd


def torus_rows(X: SftSpec, sub: Subgroup, budget: int = DEFAULT_BUDGET) -> tuple:
    """All configurations of X_[sub] as rows over the fundamental domain."""
    if sub.index == INFINITE:
        raise GroupError("periodic points need a finite-index subgroup")
    dom = sub.fundamental_domain()
    comp = compile_domain(X, dom, reduce=sub.reduce, anchors=dom)
    return dom, comp.enumerate(budget=budget)


def torus_count(X: SftSpec, sub: Subgroup) -> int:
    dom = sub.fundamental_domain()
    return compile_domain(X, dom, reduce=sub.reduce, anchors=dom).count()


def stabilizer_of(config, dom: tuple, sub: Subgroup) -> Subgroup:
    """Exact stabilizer of the periodic point given on a fundamental domain."""
    spec = sub.spec
    pos = {c: i for i, c in enumerate(dom)}
    gens = [r for r in sub.rows]
    for g in dom:
        if not any(g):
            continue
        if all(config[pos[sub.reduce(spec.add(c, g))]] == config[i] for i, c in enumerate(dom)):
            gens.append(g)
    return Subgroup.from_generators([spec.reduce(r) for r in gens], spec)


def periodic_points(X: SftSpec, sub: Subgroup, exact_stab: bool = False,
                    budget: int = DEFAULT_BUDGET) -> PeriodicPointSet:
    dom, rows = torus_rows(X, sub, budget)
    configs = [tuple(int(v) for v in r) for r in rows]
    if exact_stab:
        configs = [c for c in configs if stabilizer_of(c, dom, sub) == sub]
    return PeriodicPointSet(sub, exact_stab, dom, configs)


def exact_stab_count(X: SftSpec, sub: Subgroup, _memo: dict | None = None) -> int:
    """|X_sub| by inclusion-exclusion over overgroups: |X_[sub]| - sum |X_H|, H > sub."""
    memo = {} if _memo is None else _memo
    if sub in memo:
        return memo[sub]
    total = torus_count(X, sub)
    for h in overgroups(sub):
        total -= exact_stab_count(X, h, memo)
    memo[sub] = total
    return total


def fullshift_exact_stab_count(q: int, sub: Subgroup, _memo: dict | None = None) -> int:
    """Exact-stabilizer count for the full shift on q symbols."""
    memo = {} if _memo is None else _memo
    if sub in memo:
        return memo[sub]
    total = q ** sub.index
    for h in overgroups(sub):
        total -= fullshift_exact_stab_count(q, h, memo)
    memo[sub] = total
    return total


def census(X: SftSpec, max_index: int) -> list:
    """Rows ``(subgroup, |X_[G0]|, |X_G0|)`` for every subgroup of index <= max_index."""
    memo: dict = {}
    out = []
    for s in enumerate_subgroups(max_index, X.group):
        out.append((s, torus_count(X, s), exact_stab_count(X, s, memo)))
    return out


# ----------------------------------------------------------------------------
# kernels


@dataclass
class KernelEvidence:
    generator: tuple
    member: bool
    kind: str          # "separating-point" or "window-implication"
    exact: bool
    detail: dict = field(default_factory=dict)


@dataclass
class KernelCertificate:
    evidence: list

    @property
    def members(self) -> list:
        return [e.generator for e in self.evidence if e.member]

    @property
    def exact(self) -> bool:
        return all(e.exact for e in self.evidence)


def _candidates(spec: GroupSpec, bound: int) -> list:
    from .group import make_box
    out = [g for g in make_box(bound, spec) if any(g)]
    return sorted(out, key=lambda g: (sum(abs(x) for x in g[:spec.rank]), g))


def kernel_of(X: SftSpec, search_bound: int = 2, scale: int = 2) -> KernelCertificate:
    """Evidence for or against each candidate element fixing every point of X.

    A candidate is excluded by a periodic point (over a subgroup of small
    index) that it moves. Otherwise it is supported when x_v = x_(v+g)
    holds on every admissible pattern of a box around {0, g}; this check is
    exact for rank at most 1 and flagged for rank 2.
    """
    spec = X.group
    out = []
    subs = [s for s in enumerate_subgroups(_small_index(spec), spec)] if spec.rank <= 2 else []
    for g in _candidates(spec, search_bound):
        ev = None
        for s in subs:
            if s.contains(g):
                continue
            dom, rows = torus_rows(X, s)
            pos = {c: i for i, c in enumerate(dom)}
            for r in rows:
                if any(r[pos[s.reduce(spec.add(c, g))]] != r[i] for i, c in enumerate(dom)):
                    ev = KernelEvidence(g, False, "separating-point", True,
                                        {"subgroup": s.generators_text(),
                                         "point": [int(v) for v in r]})
                    break
            if ev:
                break
        if ev is None:
            from .group import make_box
            box = spec.minkowski(make_box(scale, spec), [spec.zero(), g])
            cells, rows, exact = language_rows(X, box)
            pos = {c: i for i, c in enumerate(cells)}
            ok = True
            for c in cells:
                e = spec.add(c, g)
                if e in pos and np.any(rows[:, pos[c]] != rows[:, pos[e]]):
                    ok = False
                    break
            ev = KernelEvidence(g, ok, "window-implication", exact,
                                {"scale": scale, "patterns": int(rows.shape[0])})
        out.append(ev)
    return KernelCertificate(out)


def _small_index(spec: GroupSpec) -> int:
    return 4 * spec.torsion_order if spec.rank == 2 else 6 * spec.torsion_order
