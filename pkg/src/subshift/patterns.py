"""Patterns, SFT presentations, languages and sliding block codes.

Symbols are stored as integers indexing the alphabet. A pattern is a pair of
parallel tuples (sorted support, values). An SFT keeps its forbidden data as
*clauses*: patterns whose support sits inside the window. The lifted view
with every forbidden pattern on exactly the window is available as
:attr:`SftSpec.forbidden`.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .group import Element, FiniteSet, GroupError, GroupSpec, fset

DEFAULT_BUDGET = 5_000_000


class BudgetError(RuntimeError):
    """An enumeration would exceed its configured budget."""


class AlphabetError(ValueError):
    pass


@dataclass(frozen=True)
class Pattern:
    """A finite configuration: sorted support with one symbol index per site."""

    support: tuple
    values: tuple

    def __post_init__(self):
        if len(self.support) != len(self.values):
            raise ValueError("support and values differ in length")

    @classmethod
    def from_mapping(cls, mapping: Mapping[Element, int]) -> "Pattern":
        items = sorted((tuple(k), int(v)) for k, v in mapping.items())
        return cls(tuple(k for k, _ in items), tuple(v for _, v in items))

    @classmethod
    def from_word(cls, word: Sequence[int], start: int = 0) -> "Pattern":
        """A 1D pattern on {start, ..., start+len-1}."""
        return cls(tuple((start + i,) for i in range(len(word))), tuple(int(x) for x in word))

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.values))

    def __getitem__(self, e: Element) -> int:
        return self.as_dict()[tuple(e)]

    def __len__(self):
        return len(self.support)

    def restrict(self, S: Iterable[Element]) -> "Pattern":
        d = self.as_dict()
        return Pattern.from_mapping({e: d[e] for e in S})

    def translate(self, v: Element, spec: GroupSpec) -> "Pattern":
        """The pattern p' with p'(s+v) = p(s)."""
        return Pattern.from_mapping({spec.add(s, v): x for s, x in zip(self.support, self.values)})

    def shift(self, v: Element, spec: GroupSpec) -> "Pattern":
        """sigma_v applied to the pattern: (sigma_v p)(u) = p(u+v)."""
        return self.translate(spec.neg(v), spec)

    def word(self) -> tuple:
        return self.values


class SftSpec:
    """A subshift of finite type on ``group``.

    Parameters
    ----------
    group : GroupSpec
    alphabet : sequence of str
        Distinct symbol names; symbol ``i`` is ``alphabet[i]``.
    window : iterable of elements
        The window W. It is translated so that it contains 0.
    clauses : iterable of Pattern
        Forbidden patterns with support inside W.
    """

    def __init__(self, group: GroupSpec, alphabet: Sequence[str], window: Iterable[Element],
                 clauses: Iterable[Pattern] = ()):
        alphabet = tuple(str(a) for a in alphabet)
        if not alphabet:
            raise AlphabetError("alphabet must be nonempty")
        if len(set(alphabet)) != len(alphabet):
            raise AlphabetError("alphabet symbols must be distinct")
        window = fset(group.reduce(tuple(w)) for w in window)
        if not window:
            raise ValueError("window must be nonempty")
        clauses = [c if isinstance(c, Pattern) else Pattern.from_mapping(c) for c in clauses]
        shift = None
        if group.zero() not in window:
            shift = group.neg(window[0])
            window = group.translate(window, shift)
        wset = set(window)
        q = len(alphabet)
        norm = []
        for c in clauses:
            if shift is not None:
                c = c.translate(shift, group)
            c = Pattern.from_mapping({group.reduce(s): v for s, v in zip(c.support, c.values)})
            if not set(c.support) <= wset:
                raise ValueError(f"forbidden pattern support {c.support} not inside window")
            for v in c.values:
                if not 0 <= v < q:
                    raise AlphabetError(f"symbol index {v} outside alphabet of size {q}")
            norm.append(c)
        self.group = group
        self.alphabet = alphabet
        self.window = window
        self.clauses = tuple(sorted(set(norm), key=lambda p: (len(p.support), p.support, p.values)))
        self._cache: dict = {}

    @property
    def q(self) -> int:
        return len(self.alphabet)

    @property
    def rank(self) -> int:
        return self.group.rank

    def symbol_index(self, name: str) -> int:
        try:
            return self.alphabet.index(str(name))
        except ValueError:
            raise AlphabetError(f"symbol {name!r} not in alphabet {self.alphabet}") from None

    def __repr__(self):
        return (f"SftSpec(group={self.group}, alphabet={self.alphabet}, window={self.window}, "
                f"clauses={len(self.clauses)})")

    @property
    def forbidden(self) -> frozenset:
        """Forbidden patterns lifted to the full window, as value tuples over ``window``."""
        if "forbidden" not in self._cache:
            self._cache["forbidden"] = frozenset(self.lifted_forbidden())
        return self._cache["forbidden"]

    def lifted_forbidden(self, budget: int = DEFAULT_BUDGET) -> set:
        out = set()
        pos = {w: i for i, w in enumerate(self.window)}
        n = len(self.window)
        for c in self.clauses:
            free = [i for i in range(n) if self.window[i] not in set(c.support)]
            if self.q ** len(free) > budget:
                raise BudgetError("lifting a clause to the full window exceeds the budget")
            base = [0] * n
            for s, v in zip(c.support, c.values):
                base[pos[s]] = v
            for vals in itertools.product(range(self.q), repeat=len(free)):
                for i, v in zip(free, vals):
                    base[i] = v
                out.add(tuple(base))
        return out

    def key(self) -> tuple:
        return (self.group, self.alphabet, self.window, self.forbidden)

    def __eq__(self, other):
        return isinstance(other, SftSpec) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def clause_groups(self) -> list:
        """Clauses grouped by normalized support: ``[(support, sorted codes)]``.

        Supports are translated so their least element is 0; a code is
        ``sum(value_j * q**j)`` in support order.
        """
        if "groups" in self._cache:
            return self._cache["groups"]
        g = self.group
        acc: dict = {}
        for c in self.clauses:
            c0 = c.translate(g.neg(c.support[0]), g)
            code = 0
            mul = 1
            for v in c0.values:
                code += v * mul
                mul *= self.q
            acc.setdefault(c0.support, set()).add(code)
        out = []
        for S in sorted(acc):
            if self.q ** len(S) >= 2 ** 62:
                raise BudgetError("clause too large for 64-bit codes")
            out.append((S, np.array(sorted(acc[S]), dtype=np.int64)))
        self._cache["groups"] = out
        return out

    def clause_span(self) -> FiniteSet:
        """Union of all normalized clause supports."""
        out = set()
        for S, _ in self.clause_groups():
            out.update(S)
        return fset(out) if out else (self.group.zero(),)


# ----------------------------------------------------------------------------
# constraint compilation


class Compiled:
    """Flattened constraint data for :func:`subshift.kernels.backtrack`."""

    def __init__(self, X: SftSpec, cells: Sequence[Element], placements: list):
        self.X = X
        self.cells = tuple(cells)
        n = len(cells)
        groups = X.clause_groups()
        set_ptr = [0]
        codes = []
        for _, arr in groups:
            codes.extend(arr.tolist())
            set_ptr.append(len(codes))
        placements = sorted(set(placements), key=lambda p: (max(p[1]), p))
        by_trig: list = [[] for _ in range(n)]
        for k, (_, idx) in enumerate(placements):
            by_trig[max(idx)].append(k)
        trig_ptr = [0]
        trig_plc = []
        for lst in by_trig:
            trig_plc.extend(lst)
            trig_ptr.append(len(trig_plc))
        plc_ptr = [0]
        plc_cells = []
        plc_set = []
        for gid, idx in placements:
            plc_cells.extend(idx)
            plc_ptr.append(len(plc_cells))
            plc_set.append(gid)
        as64 = lambda a: np.asarray(a, dtype=np.int64)
        self.placements = placements
        self.args = (as64(trig_ptr), as64(trig_plc), as64(plc_ptr), as64(plc_cells),
                     as64(plc_set), as64(set_ptr), as64(codes))

    def run(self, mode: int, domains: Sequence[int] | None = None, limit: int = 0):
        n = len(self.cells)
        full = (1 << self.X.q) - 1
        if domains is None:
            domains = [full] * n
        count, rows = kernels.backtrack(n, self.X.q, np.asarray(domains, dtype=np.int64),
                                        *self.args, mode, int(limit))
        return int(count), rows

    def count(self, domains=None, limit: int = 0) -> int:
        return self.run(kernels.MODE_COUNT, domains, limit)[0]

    def exists(self, domains=None) -> bool:
        return self.run(kernels.MODE_EXISTS, domains)[0] > 0

    def enumerate(self, domains=None, budget: int = DEFAULT_BUDGET) -> np.ndarray:
        count, rows = self.run(kernels.MODE_ENUM, domains, budget + 1)
        if count > budget:
            raise BudgetError(f"more than {budget} patterns on {len(self.cells)} cells")
        return rows


def compile_domain(X: SftSpec, cells: Sequence[Element], reduce=None, anchors=None) -> Compiled:
    """Compile X's clauses on an ordered list of cells.

    Without ``reduce``, every translate of a clause lying inside ``cells`` is
    a placement. With ``reduce`` (a map onto representatives in ``cells``),
    clauses are placed at each anchor and wrapped around, which presents
    periodic configurations on a fundamental domain.
    """
    g = X.group
    index = {c: i for i, c in enumerate(cells)}
    placements = []
    for gid, (S, _) in enumerate(X.clause_groups()):
        if reduce is None:
            cand = {g.sub(c, S[0]) for c in cells}
        else:
            cand = anchors if anchors is not None else cells
        for v in cand:
            idx = []
            for s in S:
                e = g.add(v, s)
                if reduce is not None:
                    e = reduce(e)
                i = index.get(e)
                if i is None:
                    break
                idx.append(i)
            else:
                placements.append((gid, tuple(idx)))
    return Compiled(X, cells, placements)


# ----------------------------------------------------------------------------
# admissibility and languages


def _check_symbols(X: SftSpec, p: Pattern):
    for v in p.values:
        if not 0 <= v < X.q:
            raise AlphabetError(f"symbol index {v} outside alphabet {X.alphabet}")


def violations(X: SftSpec, p: Pattern) -> list:
    """Placements ``(translate, clause)`` of forbidden clauses matched inside p."""
    _check_symbols(X, p)
    g = X.group
    d = p.as_dict()
    out = []
    for c in X.clauses:
        for v in {g.sub(e, c.support[0]) for e in p.support}:
            ok = True
            for s, x in zip(c.support, c.values):
                y = d.get(g.add(v, s))
                if y is None or y != x:
                    ok = False
                    break
            if ok:
                out.append((v, c))
    return out


def is_locally_admissible(X: SftSpec, p: Pattern) -> bool:
    return not violations(X, p)


def _rows_admissible(X: SftSpec, cells: Sequence[Element], rows: np.ndarray) -> np.ndarray:
    """Vectorized local admissibility of many patterns on the same cells."""
    comp = compile_domain(X, cells)
    ok = np.ones(rows.shape[0], dtype=bool)
    groups = X.clause_groups()
    q = X.q
    for gid, idx in comp.placements:
        code = np.zeros(rows.shape[0], dtype=np.int64)
        mul = 1
        for i in idx:
            code += rows[:, i].astype(np.int64) * mul
            mul *= q
        ok &= ~np.isin(code, groups[gid][1])
    return ok


def local_language_rows(X: SftSpec, F: Iterable[Element], budget: int = DEFAULT_BUDGET,
                        domains=None) -> tuple:
    """``(cells, rows)`` of all locally admissible patterns on F."""
    cells = fset(X.group.reduce(tuple(e)) for e in F)
    comp = compile_domain(X, cells)
    return cells, comp.enumerate(domains, budget)


def local_language(X: SftSpec, F: Iterable[Element], budget: int = DEFAULT_BUDGET) -> list:
    cells, rows = local_language_rows(X, F, budget)
    return [Pattern(cells, tuple(int(v) for v in r)) for r in rows]


def count_local(X: SftSpec, F: Iterable[Element]) -> int:
    cells = fset(X.group.reduce(tuple(e)) for e in F)
    return compile_domain(X, cells).count()


def rows_to_patterns(cells, rows) -> list:
    return [Pattern(tuple(cells), tuple(int(v) for v in r)) for r in rows]


def language_rows(X: SftSpec, F: Iterable[Element], budget: int = DEFAULT_BUDGET) -> tuple:
    """``(cells, rows, exact)`` for the language of X on F.

    The result is exact for rank 0 and rank 1 (decided through finite
    quotients and transfer graphs) and for any rank when a safe symbol is
    certified; otherwise it is the locally admissible superset.
    """
    cells = fset(X.group.reduce(tuple(e)) for e in F)
    if X.rank == 0:
        return cells, _finite_language(X, cells), True
    if X.rank == 1:
        from .transfer import exact_language_rows
        return cells, exact_language_rows(X, cells, budget), True
    a = safe_symbol_cached(X)
    cells, rows = local_language_rows(X, cells, budget)
    if a is None:
        return cells, rows, False
    return cells, rows[_padded_ok(X, cells, rows, a)], True


def language(X: SftSpec, F: Iterable[Element], budget: int = DEFAULT_BUDGET) -> tuple:
    """``(patterns, exact)``; see :func:`language_rows`."""
    cells, rows, exact = language_rows(X, F, budget)
    return rows_to_patterns(cells, rows), exact


def _finite_language(X: SftSpec, cells) -> np.ndarray:
    g = X.group
    dom = tuple(g.torsion_elements())
    comp = compile_domain(X, dom, reduce=g.reduce)
    rows = comp.enumerate()
    pos = [dom.index(c) for c in cells]
    if rows.shape[0] == 0:
        return np.zeros((0, len(cells)), dtype=np.int8)
    return np.unique(rows[:, pos], axis=0)


def _padded_ok(X: SftSpec, cells, rows: np.ndarray, a: int) -> np.ndarray:
    """Which patterns stay locally admissible after padding with symbol a."""
    g = X.group
    span = X.clause_span()
    reach = g.difference(span, span)
    region = fset(set(cells) | set(g.minkowski(cells, reach)))
    pos = {c: i for i, c in enumerate(region)}
    full = np.full((rows.shape[0], len(region)), a, dtype=np.int8)
    for j, c in enumerate(cells):
        full[:, pos[c]] = rows[:, j]
    return _rows_admissible(X, region, full)


# ----------------------------------------------------------------------------
# safe symbols


def is_safe_symbol(X: SftSpec, a) -> bool:
    """Whether writing symbol ``a`` anywhere keeps configurations in X.

    A clause c with c_u = a is dangerous when the pattern c[u <- b], b != a,
    extends to a locally admissible pattern on its neighbourhood: then a
    configuration can show c after writing a at u. A True answer is sound;
    an extension that exists locally but not globally can only make the
    check more conservative.
    """
    if isinstance(a, str):
        a = X.symbol_index(a)
    if not 0 <= a < X.q:
        raise AlphabetError(f"symbol index {a} outside alphabet")
    g = X.group
    span = X.clause_span()
    reach = g.difference(span, span)
    full = (1 << X.q) - 1
    for c in X.clauses:
        region = fset(set(c.support) | set(g.minkowski(c.support, reach)))
        comp = compile_domain(X, region)
        pos = {e: i for i, e in enumerate(region)}
        for u, v in zip(c.support, c.values):
            if v != a:
                continue
            for b in range(X.q):
                if b == a:
                    continue
                doms = [full] * len(region)
                for s, x in zip(c.support, c.values):
                    doms[pos[s]] = 1 << x
                doms[pos[u]] = 1 << b
                if comp.exists(doms):
                    return False
    return True


def safe_symbol_cached(X: SftSpec):
    """Least safe symbol of X, or None."""
    if "safe" not in X._cache:
        found = None
        for a in range(X.q):
            if is_safe_symbol(X, a):
                found = a
                break
        X._cache["safe"] = found
    return X._cache["safe"]


# ----------------------------------------------------------------------------
# constructions


def full_shift(spec: GroupSpec, alphabet: Sequence[str]) -> SftSpec:
    return SftSpec(spec, alphabet, [spec.zero()], [])


def forbid_pattern(X: SftSpec, w: Pattern) -> SftSpec:
    """SFT of points of X in which no translate of w occurs."""
    g = X.group
    _check_symbols(X, w)
    w = w.translate(g.neg(min(w.support)), g)
    window = fset(set(X.window) | set(w.support))
    return SftSpec(g, X.alphabet, window, list(X.clauses) + [w])


def sample_pattern(X: SftSpec, F: Iterable[Element], rng: random.Random,
                   max_steps: int = 1_000_000, fixed: Mapping | None = None,
                   domains: Mapping | None = None) -> Pattern | None:
    """Random locally admissible pattern on F by randomized backtracking."""
    g = X.group
    cells = fset(g.reduce(tuple(e)) for e in F)
    comp = compile_domain(X, cells)
    groups = X.clause_groups()
    sets = [set(arr.tolist()) for _, arr in groups]
    trig: list = [[] for _ in cells]
    for gid, idx in comp.placements:
        trig[max(idx)].append((gid, idx))
    n = len(cells)
    allowed = []
    for c in cells:
        if fixed is not None and c in fixed:
            allowed.append([fixed[c]])
        elif domains is not None and c in domains:
            allowed.append(list(domains[c]))
        else:
            allowed.append(list(range(X.q)))
    order = [None] * n
    val = [0] * n
    ptr = [0] * n
    pos = 0
    steps = 0
    q = X.q
    if n == 0:
        return Pattern((), ())
    order[0] = rng.sample(allowed[0], len(allowed[0]))
    while 0 <= pos < n:
        steps += 1
        if steps > max_steps:
            return None
        if ptr[pos] >= len(order[pos]):
            pos -= 1
            if pos >= 0:
                ptr[pos] += 1
            continue
        val[pos] = order[pos][ptr[pos]]
        ok = True
        for gid, idx in trig[pos]:
            code = 0
            mul = 1
            for i in idx:
                code += val[i] * mul
                mul *= q
            if code in sets[gid]:
                ok = False
                break
        if not ok:
            ptr[pos] += 1
            continue
        pos += 1
        if pos < n:
            order[pos] = rng.sample(allowed[pos], len(allowed[pos]))
            ptr[pos] = 0
    if pos < 0:
        return None
    return Pattern(cells, tuple(val))


# ----------------------------------------------------------------------------
# sliding block codes


class SlidingBlockCode:
    """Local rule Phi on window W0; the image is (rho x)_v = Phi(x_{v+W0}).

    Parameters
    ----------
    group : GroupSpec
    source, target : sequence of str
        Source and target alphabets.
    window : finite set
        The window W0.
    table : mapping from value tuples over W0 to target symbol index
    default : int or None
        Value used for W0-patterns missing from the table.
    """

    def __init__(self, group: GroupSpec, source: Sequence[str], target: Sequence[str],
                 window: Iterable[Element], table: Mapping[tuple, int], default: int | None = None):
        self.group = group
        self.source = tuple(source)
        self.target = tuple(target)
        self.window = fset(window)
        self.table = {tuple(k): int(v) for k, v in table.items()}
        self.default = default

    @classmethod
    def from_function(cls, group, source, target, window, fn) -> "SlidingBlockCode":
        window = fset(window)
        table = {vals: fn(vals) for vals in itertools.product(range(len(source)), repeat=len(window))}
        return cls(group, source, target, window, table)

    def lookup(self, vals: tuple) -> int:
        r = self.table.get(vals)
        if r is None:
            if self.default is None:
                raise KeyError(f"block code table has no entry for {vals}")
            return self.default
        return r

    def is_total_on(self, X: SftSpec) -> bool:
        _, rows = local_language_rows(X, self.window)
        return all(tuple(int(v) for v in r) in self.table for r in rows)

    def apply(self, p: Pattern, E: Iterable[Element]) -> Pattern:
        return apply_block_code(self, p, E)


def apply_block_code(phi: SlidingBlockCode, p: Pattern, E: Iterable[Element]) -> Pattern:
    """Phi^E(p)_v = Phi(p_{v+W0}) for v in E."""
    g = phi.group
    d = p.as_dict()
    out = {}
    for v in fset(E):
        vals = []
        for w in phi.window:
            e = g.add(v, w)
            if e not in d:
                raise GroupError(f"pattern support lacks {e} needed at {v}")
            vals.append(d[e])
        out[v] = phi.lookup(tuple(vals))
    return Pattern.from_mapping(out)
