"""Command-line interface. Exit codes: 0 verdict computed, 1 inconclusive, 2 input error."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .group import GroupError, GroupSpec
from .io import ParseError, code_from_json, emit_report, parse_spec, parse_subgroup_text, pattern_from_json, pattern_to_json

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    def __init__(self, msg: str, witness: dict | None = None):
        super().__init__(msg)
        self.witness = witness


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _spec(path: str):
    return parse_spec(_read(path))


def _json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from None


def _offsets(text: str, spec: GroupSpec) -> list:
    """``"-1,1"`` in rank 1; ``"1,0;-1,0"`` otherwise."""
    if spec.ncoords == 1:
        return [spec.reduce((int(t),)) for t in text.split(",") if t.strip()]
    return [spec.reduce(tuple(int(x) for x in row.split(","))) for row in text.split(";") if row.strip()]


# ----------------------------------------------------------------------------
# commands


def cmd_entropy(a) -> tuple:
    from .entropy import entropy_exact_1d, entropy_upper_bound, strip_entropy
    from .group import make_interval_box
    X = _spec(a.spec)
    out = {}
    if a.box:
        F = make_interval_box([0] * X.rank, [a.box - 1] * X.rank, X.group)
        est = entropy_upper_bound(X, F)
        out["h_upper"] = est.upper
        out["box"] = est.as_dict()
    if X.rank == 1:
        est = entropy_exact_1d(X)
        out["h"] = est.value
        out["exact"] = est.as_dict()
    if a.strip:
        v = tuple(int(t) for t in a.strip.split(","))
        est = strip_entropy(X, v, a.strip_n)
        out["h_strip"] = est.value
        out["strip"] = est.as_dict()
    if not out:
        raise InputError("nothing to compute: give --box, or --strip for rank 2")
    return out, EXIT_OK


def cmd_language(a) -> tuple:
    from .group import make_interval_box
    from .patterns import language_rows, rows_to_patterns
    X = _spec(a.spec)
    F = make_interval_box([0] * X.rank, [a.box - 1] * X.rank, X.group)
    cells, rows, exact = language_rows(X, F)
    out = {"count": int(rows.shape[0]), "exact": exact, "cells": len(cells),
           "language": "EXACT" if exact else "LOCAL-UPPER"}
    if a.list:
        out["patterns"] = [pattern_to_json(p, X.alphabet) for p in rows_to_patterns(cells, rows)]
    return out, EXIT_OK


def cmd_periodic(a) -> tuple:
    from .periodic import exact_stab_count, periodic_points, torus_count
    X = _spec(a.spec)
    sub = parse_subgroup_text(a.subgroup, X.group)
    if sub.index == float("inf"):
        raise InputError("subgroup must have finite index")
    out = {"subgroup": sub.generators_text(), "index": sub.index,
           "fixed": torus_count(X, sub), "exact_stab": exact_stab_count(X, sub)}
    if a.list:
        P = periodic_points(X, sub, a.exact_stab)
        out["domain"] = [list(c) for c in P.domain]
        out["points"] = [[X.alphabet[v] for v in c] for c in P.configs]
    return out, EXIT_OK


def cmd_least_periods(a) -> tuple:
    from .entropy import least_period_counts, trace_powers
    X = _spec(a.spec)
    if X.rank != 1:
        raise InputError("least-periods needs a rank-1 spec")
    return {"least_periods": least_period_counts(X, a.max), "traces": trace_powers(X, a.max)}, EXIT_OK


def cmd_voronoi(a) -> tuple:
    from .voronoi import disjointified_voronoi, tiling_diagnostics
    data = _json(a.centers)
    centers = data["centers"] if isinstance(data, dict) else data
    if not centers:
        raise InputError("no centers given")
    dim = a.dim if a.dim is not None else len(centers[0]) - len(a.torsion)
    spec = GroupSpec(dim, tuple(a.torsion))
    cs = [spec.reduce(tuple(c)) for c in centers]
    tau = disjointified_voronoi(cs, a.radius2, spec)
    out = {"tiling": tau.as_json()}
    if a.k:
        K = _offsets(a.k, spec)
        W = _offsets(a.w, spec) if a.w else K
        out["diagnostics"] = tiling_diagnostics(tau, K, W, Fraction(a.eps), Fraction(a.eps1), spec,
                                                r2=a.radius2)
    return out, EXIT_OK


def _clopen_from_json(X, obj):
    from .clopen import ClopenSet
    if obj is None:
        return ClopenSet.whole(X)
    pats = obj if isinstance(obj, list) else [obj]
    C = None
    for p in pats:
        cyl = ClopenSet.cylinder(X, pattern_from_json(p, X))
        C = cyl if C is None else C.union(cyl)
    return C


def cmd_marker_lemma(a) -> tuple:
    from .markers import MarkerError, marker_lemma, verify_marker
    X = _spec(a.spec)
    P = _offsets(a.p, X.group)
    V = _clopen_from_json(X, _json(a.v) if a.v else None)
    try:
        M = marker_lemma(X, V, P)
    except MarkerError as exc:
        raise InputError(str(exc), _witness(exc.witness)) from None
    C = M.clopen()
    rep = verify_marker(X, V, P, C)
    out = {"window": [list(w) for w in C.window], "patterns": [list(p) for p in sorted(C.allowed)],
           "classes": M.nclasses, "verification": rep}
    return out, EXIT_OK if rep["exact"] else EXIT_INCONCLUSIVE


def _witness(w: dict) -> dict:
    return {str(k): (list(v) if isinstance(v, tuple) else v) for k, v in w.items()}


def cmd_find_marker(a) -> tuple:
    from .overlaps import SearchError, find_overlap_free_pattern, verify_overlap_free
    X = _spec(a.spec)
    try:
        res = find_overlap_free_pattern(X, a.n, seed=a.seed, attempts=a.attempts)
    except SearchError as exc:
        return {"found": False, "reason": str(exc), "attempts": exc.attempts}, EXIT_INCONCLUSIVE
    ok = verify_overlap_free(X, res.pattern, a.n, res.allowed)
    return {"found": True, "verified": ok, "attempts": res.attempts,
            "pattern": pattern_to_json(res.pattern, X.alphabet),
            "allowed_overlaps": [list(v) for v in res.allowed]}, EXIT_OK


def cmd_retract(a) -> tuple:
    from .markers import MarkerError
    from .retract import RetractError, coloring_retract, safe_symbol_retract
    X = _spec(a.spec)
    p = pattern_from_json(_json(a.input), X)
    try:
        if a.mode == "safe":
            sym = a.symbol if a.symbol is not None else None
            if sym is None:
                from .patterns import safe_symbol_cached
                idx = safe_symbol_cached(X)
                if idx is None:
                    raise InputError("no safe symbol certified")
                sym = X.alphabet[idx]
            out, omitted = safe_symbol_retract(X, p, sym)
        else:
            F = _offsets(a.f, X.group)
            R = coloring_retract(X.q, F, X)
            out, omitted = R.apply(p)
    except (RetractError, MarkerError) as exc:
        raise InputError(str(exc), _witness(getattr(exc, "witness", {}))) from None
    return {"output": pattern_to_json(out, X.alphabet), "omitted": [list(v) for v in omitted]}, EXIT_OK


def cmd_verify_homotopy(a) -> tuple:
    from .retract import verify_homotopy
    Y = _spec(a.spec)
    psi = code_from_json(_json(a.psi), Y.group)
    rep = verify_homotopy(Y, psi, a.period_bound)
    return {"passed": rep.passed, "checks": rep.checks, "counterexample": rep.counterexample,
            "label": rep.label}, EXIT_OK


def cmd_gfree(a) -> tuple:
    from .retract import gfree_witness
    X = _spec(a.spec)
    fam = []
    for part in a.groups.split("|"):
        s = parse_subgroup_text(part, X.group)
        fam.append((s, [X.group.reduce(r) for r in s.rows]))
    res = gfree_witness(X, fam, a.max_window)
    out = {"verdict": res.verdict, "exact": res.exact, "counterexample": res.counterexample,
           "window": None if res.window is None else [list(w) for w in res.window]}
    return out, EXIT_INCONCLUSIVE if res.verdict == "INCONCLUSIVE" else EXIT_OK


def cmd_check_embed(a) -> tuple:
    from .embed import krieger_check, z2_fullshift_check
    X = _spec(a.x)
    if a.y:
        Y = _spec(a.y)
    elif a.y_full_alphabet:
        Y = a.y_full_alphabet
    else:
        raise InputError("give --y or --y-full-alphabet")
    dim = a.dim if a.dim is not None else X.rank
    if dim != X.rank:
        raise InputError(f"--dim {dim} does not match the SFT rank {X.rank}")
    if dim == 1:
        rep = krieger_check(X, Y, a.max_period)
    elif dim == 2:
        if not isinstance(Y, int):
            raise InputError("rank-2 checks need --y-full-alphabet")
        rep = z2_fullshift_check(X, Y, a.max_index, a.max_prim_norm, a.max_n)
    else:
        raise InputError("check-embed supports dim 1 and 2")
    out = rep.as_dict()
    return out, EXIT_INCONCLUSIVE if rep.verdict == "INCONCLUSIVE" else EXIT_OK


def cmd_build_embedding(a) -> tuple:
    from .embed import EmbedError, construct_embedding_1d
    X = _spec(a.x)
    if X.rank != 1:
        raise InputError("build-embedding needs a rank-1 spec")
    try:
        art = construct_embedding_1d(X, a.target, a.period_bound, seed=a.seed)
    except EmbedError as exc:
        rep = exc.report.as_dict() if exc.report is not None else None
        return {"built": False, "reason": str(exc), "report": rep}, EXIT_INCONCLUSIVE
    return {"built": True, "artifact": art.as_dict()}, EXIT_OK


COMMANDS = {
    "entropy": cmd_entropy, "language": cmd_language, "periodic": cmd_periodic,
    "least-periods": cmd_least_periods, "voronoi": cmd_voronoi, "marker-lemma": cmd_marker_lemma,
    "find-marker": cmd_find_marker, "retract": cmd_retract, "verify-homotopy": cmd_verify_homotopy,
    "gfree": cmd_gfree, "check-embed": cmd_check_embed, "build-embedding": cmd_build_embedding,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1, help="worker count (results do not depend on it)")
    p = argparse.ArgumentParser(prog="subshift", description="Finite computations on subshifts of finite type.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("entropy", parents=[common])
    s.add_argument("--spec", required=True)
    s.add_argument("--box", type=int)
    s.add_argument("--strip", help="period vector v, e.g. 0,1")
    s.add_argument("--strip-n", type=int, default=1)

    s = sub.add_parser("language", parents=[common])
    s.add_argument("--spec", required=True)
    s.add_argument("--box", type=int, required=True)
    s.add_argument("--list", action="store_true")

    s = sub.add_parser("periodic", parents=[common])
    s.add_argument("--spec", required=True)
    s.add_argument("--subgroup", required=True)
    s.add_argument("--exact-stab", action="store_true")
    s.add_argument("--list", action="store_true")

    s = sub.add_parser("least-periods", parents=[common])
    s.add_argument("--spec", required=True)
    s.add_argument("--max", type=int, default=12)

    s = sub.add_parser("voronoi", parents=[common])
    s.add_argument("--centers", required=True)
    s.add_argument("--radius2", type=int, required=True)
    s.add_argument("--dim", type=int)
    s.add_argument("--torsion", type=lambda t: [int(x) for x in t.split(",") if x], default=[])
    s.add_argument("--k")
    s.add_argument("--w")
    s.add_argument("--eps", default="1/2")
    s.add_argument("--eps1", default="1/2")

    s = sub.add_parser("marker-lemma", parents=[common])
    s.add_argument("--spec", required=True)
    s.add_argument("--p", required=True)
    s.add_argument("--v")

    s = sub.add_parser("find-marker", parents=[common])
    s.add_argument("--spec", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--attempts", type=int, default=200)

    s = sub.add_parser("retract", parents=[common])
    s.add_argument("--mode", choices=("safe", "coloring"), required=True)
    s.add_argument("--spec", required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--symbol")
    s.add_argument("--f", default="-1,1", help="neighbourhood F for coloring mode")

    s = sub.add_parser("verify-homotopy", parents=[common])
    s.add_argument("--spec", required=True)
    s.add_argument("--psi", required=True)
    s.add_argument("--period-bound", type=int, default=6)

    s = sub.add_parser("gfree", parents=[common])
    s.add_argument("--spec", required=True)
    s.add_argument("--groups", required=True)
    s.add_argument("--max-window", type=int, default=6)

    s = sub.add_parser("check-embed", parents=[common])
    s.add_argument("--x", required=True)
    s.add_argument("--y")
    s.add_argument("--y-full-alphabet", type=int)
    s.add_argument("--dim", type=int)
    s.add_argument("--max-period", type=int, default=12)
    s.add_argument("--max-index", type=int, default=6)
    s.add_argument("--max-prim-norm", type=float, default=3)
    s.add_argument("--max-n", type=int, default=4)

    s = sub.add_parser("build-embedding", parents=[common])
    s.add_argument("--x", required=True)
    s.add_argument("--target", type=int, required=True)
    s.add_argument("--period-bound", type=int, default=8)
    return p


_OFFSET_OPTS = ("--p", "--k", "--w", "--f", "--strip")


def _join_offset_args(argv: list) -> list:
    """Let offset lists start with a minus sign, as in ``--p -1,1``."""
    out = []
    i = 0
    while i < len(argv):
        if argv[i] in _OFFSET_OPTS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _join_offset_args(argv)
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    head = {"command": argv, "seed": a.seed, "version": __version__}
    try:
        result, code = COMMANDS[a.command](a)
    except (InputError, ParseError, GroupError, KeyError, ValueError) as exc:
        payload = dict(head, error=str(exc))
        wit = getattr(exc, "witness", None)
        if wit:
            payload["witness"] = wit
        sys.stdout.write(emit_report(payload, a.format))
        return EXIT_INPUT
    payload = dict(head, **result) if a.format == "table" else dict(head, result=result)
    sys.stdout.write(emit_report(payload, a.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
