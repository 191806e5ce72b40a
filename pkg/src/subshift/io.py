"""Text format for SFTs, patterns and codes, plus deterministic report emission.

A spec file holds ``key = value`` lines; ``#`` starts a comment::

    dim = 1
    torsion = []
    alphabet = 0 1
    window = (0) (1)
    forbid = {(0):1, (1):1}

Offsets are written ``(a,b;g1,g2)`` with the torsion coordinates after the
semicolon. Symbols in patterns are alphabet names. ``forbid`` may repeat.
"""
from __future__ import annotations

import json
import math
import re

from .group import GroupSpec
from .patterns import Pattern, SftSpec, SlidingBlockCode

_OFF = re.compile(r"\(([^()]*)\)")


class ParseError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        super().__init__(msg if line is None else f"line {line}: {msg}")
        self.line = line


def parse_offset(text: str, spec: GroupSpec, line: int | None = None) -> tuple:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    free, _, tor = text.partition(";")
    try:
        f = [int(t) for t in free.split(",") if t.strip()]
        g = [int(t) for t in tor.split(",") if t.strip()]
    except ValueError:
        raise ParseError(f"bad offset {text!r}", line) from None
    if len(f) != spec.rank or len(g) != len(spec.moduli):
        raise ParseError(f"offset {text!r} does not match dim {spec.rank} and torsion {list(spec.moduli)}", line)
    return spec.reduce(tuple(f) + tuple(g))


def format_offset(e, spec: GroupSpec) -> str:
    free = ",".join(str(x) for x in e[:spec.rank])
    if spec.moduli:
        return f"({free};{','.join(str(x) for x in e[spec.rank:])})"
    return f"({free})"


def parse_pattern(text: str, spec: GroupSpec, alphabet, line: int | None = None) -> Pattern:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError(f"pattern must be enclosed in braces: {text!r}", line)
    body = text[1:-1]
    out = {}
    for m in re.finditer(r"\(([^()]*)\)\s*:\s*([^,\s}]+)", body):
        e = parse_offset(m.group(1), spec, line)
        sym = m.group(2)
        if sym not in alphabet:
            raise ParseError(f"undeclared symbol {sym!r}", line)
        if e in out:
            raise ParseError(f"offset {m.group(1)} repeated", line)
        out[e] = alphabet.index(sym)
    rest = re.sub(r"\(([^()]*)\)\s*:\s*([^,\s}]+)", "", body).replace(",", "").strip()
    if rest:
        raise ParseError(f"cannot parse pattern near {rest!r}", line)
    return Pattern.from_mapping(out)


def format_pattern(p: Pattern, spec: GroupSpec, alphabet) -> str:
    return "{" + ", ".join(f"{format_offset(e, spec)}:{alphabet[v]}"
                           for e, v in zip(p.support, p.values)) + "}"


def parse_spec(text: str) -> SftSpec:
    """Parse spec text; errors carry the offending line number."""
    fields: dict = {}
    forbids = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", no)
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key == "forbid":
            forbids.append((no, val))
        elif key in ("dim", "torsion", "alphabet", "window"):
            if key in fields:
                raise ParseError(f"duplicate key {key!r}", no)
            fields[key] = (no, val)
        else:
            raise ParseError(f"unknown key {key!r}", no)
    for key in ("dim", "alphabet", "window"):
        if key not in fields:
            raise ParseError(f"missing key {key!r}")
    no, v = fields["dim"]
    try:
        dim = int(v)
    except ValueError:
        raise ParseError(f"dim must be an integer, got {v!r}", no) from None
    mods: tuple = ()
    if "torsion" in fields:
        no, v = fields["torsion"]
        v = v.strip().strip("[]")
        try:
            mods = tuple(int(t) for t in v.split(",") if t.strip())
        except ValueError:
            raise ParseError(f"bad torsion list {v!r}", no) from None
    try:
        spec = GroupSpec(dim, mods)
    except ValueError as exc:
        raise ParseError(str(exc), fields["dim"][0]) from None
    no, v = fields["alphabet"]
    alphabet = v.split()
    if not alphabet or len(set(alphabet)) != len(alphabet):
        raise ParseError("alphabet must list distinct symbols", no)
    no, v = fields["window"]
    offs = _OFF.findall(v)
    if not offs or _OFF.sub("", v).strip():
        raise ParseError("window must be a list of offsets", no)
    window = [parse_offset(o, spec, no) for o in offs]
    wset = set(window)
    clauses = []
    for no, v in forbids:
        p = parse_pattern(v, spec, alphabet, no)
        if not set(p.support) <= wset:
            raise ParseError("forbidden pattern support is not inside the window", no)
        clauses.append(p)
    return SftSpec(spec, alphabet, window, clauses)


def print_spec(X: SftSpec) -> str:
    """Canonical text; parse(print(X)) equals X."""
    g = X.group
    lines = [
        f"dim = {g.rank}",
        f"torsion = [{','.join(str(m) for m in g.moduli)}]",
        f"alphabet = {' '.join(X.alphabet)}",
        "window = " + " ".join(format_offset(w, g) for w in X.window),
    ]
    for c in sorted(X.clauses, key=lambda p: (p.support, p.values)):
        lines.append("forbid = " + format_pattern(c, g, X.alphabet))
    return "\n".join(lines) + "\n"


def parse_subgroup_text(text: str, spec: GroupSpec):
    from .subgroups import parse_subgroup
    try:
        return parse_subgroup(text, spec)
    except (ValueError, IndexError) as exc:
        raise ParseError(f"bad subgroup {text!r}: {exc}") from None


def pattern_from_json(obj, X: SftSpec) -> Pattern:
    """``{"cells": [[...], ...], "values": [...]}`` with symbol names or indices, or a word string."""
    g = X.group
    if isinstance(obj, str):
        return Pattern.from_word([X.symbol_index(c) for c in obj])
    vals = [v if isinstance(v, int) else X.symbol_index(str(v)) for v in obj["values"]]
    cells = [g.reduce(tuple(c)) for c in obj["cells"]]
    if len(cells) != len(vals):
        raise ParseError("cells and values differ in length")
    return Pattern.from_mapping(dict(zip(cells, vals)))


def pattern_to_json(p: Pattern, alphabet=None) -> dict:
    vals = list(p.values) if alphabet is None else [alphabet[v] for v in p.values]
    return {"cells": [list(c) for c in p.support], "values": vals}


def code_from_json(obj, group: GroupSpec) -> SlidingBlockCode:
    window = [group.reduce(tuple(w)) for w in obj["window"]]
    table = {tuple(k): int(v) for k, v in obj["table"]}
    return SlidingBlockCode(group, obj["source"], obj["target"], window, table, obj.get("default"))


# ----------------------------------------------------------------------------
# reports


def _clean(obj):
    """Floats rounded to 9 places, infinities as strings, tuples as lists."""
    if isinstance(obj, float):
        if math.isinf(obj):
            return "-inf" if obj < 0 else "inf"
        if math.isnan(obj):
            return "nan"
        return float(f"{obj:.9f}")
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):
        return _clean(obj.item())
    return obj


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "-inf" if v < 0 else "inf"
        return f"{v:.9f}"
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(_clean(v), sort_keys=True, separators=(",", ":"))
    return str(v)


def emit_report(payload: dict, fmt: str = "json") -> str:
    """Canonical report text with LF line endings."""
    if fmt == "json":
        return json.dumps(_clean(payload), sort_keys=True, indent=2) + "\n"
    if fmt == "table":
        lines = []

        def walk(prefix, obj):
            if isinstance(obj, dict) and obj:
                for k in sorted(obj, key=str):
                    walk(f"{prefix}.{k}" if prefix else str(k), obj[k])
            else:
                lines.append(f"{prefix} = {_fmt(obj)}")

        walk("", payload)
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")
