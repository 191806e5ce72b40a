import json
import math
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from subshift.catalog import golden_mean, hard_square
from subshift.group import GroupSpec, make_interval_box
from subshift.io import (
    ParseError, emit_report, format_offset, parse_offset, parse_pattern, parse_spec,
    pattern_from_json, pattern_to_json, print_spec,
)
from subshift.patterns import Pattern, SftSpec, count_local

SPECS = Path(__file__).resolve().parent.parent / "specs"

GOLDEN = """# no two adjacent ones
dim = 1
torsion = []
alphabet = 0 1
window = (0) (1)
forbid = {(0):1, (1):1}
"""


def test_golden_mean():
    X = parse_spec(GOLDEN)
    assert X == golden_mean()
    assert list(X.alphabet) == ["0", "1"]


def test_hard_square_local_count():
    with open(SPECS / "hard_square.sft") as fh:
        X = parse_spec(fh.read())
    assert count_local(X, make_interval_box([0, 0], [1, 1], X.group)) == 7


def test_undeclared_symbol_reports_line():
    with pytest.raises(ParseError) as exc:
        parse_spec(GOLDEN.replace("(1):1}", "(1):7}"))
    assert exc.value.line == 6 and "'7'" in str(exc.value)


@pytest.mark.parametrize("text, needle", [
    ("dim = 1\nalphabet = 0 1\n", "missing key 'window'"),
    ("dim = 1\ndim = 1\nalphabet = 0\nwindow = (0)\n", "duplicate key 'dim'"),
    ("dim = 1\ncolour = red\n", "unknown key 'colour'"),
    ("dim = x\nalphabet = 0\nwindow = (0)\n", "integer"),
    ("dim = 1\nalphabet = 0 0\nwindow = (0)\n", "distinct"),
    ("dim = 1\nalphabet = 0 1\nwindow = (0)\nforbid = {(1):1}\n", "inside the window"),
    ("dim = 1\nalphabet = 0 1\nwindow = (0,0)\n", "does not match"),
    ("dim = 1\nalphabet = 0 1\nwindow = (0)\nforbid = (0):1\n", "braces"),
    ("dim = 1\nalphabet = 0 1\nwindow = (0) (1)\nforbid = {(0):1, (0):0}\n", "repeated"),
    ("just text\n", "key = value"),
])
def test_errors(text, needle):
    with pytest.raises(ParseError, match=needle.replace("(", r"\(")):
        parse_spec(text)


def test_torsion_offsets():
    g = GroupSpec(1, (3,))
    e = parse_offset("(2;4)", g)
    assert e == (2, 1)
    assert format_offset(e, g) == "(2;1)"


def test_round_trip_catalog():
    for X in (golden_mean(), hard_square()):
        text = print_spec(X)
        assert parse_spec(text) == X
        assert print_spec(parse_spec(text)) == text


@st.composite
def specs(draw):
    rank = draw(st.integers(1, 2))
    mods = tuple(draw(st.lists(st.integers(2, 3), max_size=1)))
    g = GroupSpec(rank, mods)
    q = draw(st.integers(1, 3))
    alphabet = [chr(ord("a") + i) for i in range(q)]
    cells = draw(st.lists(st.tuples(*[st.integers(-2, 2)] * (rank + len(mods))), min_size=1, max_size=4))
    window = sorted({g.reduce(c) for c in cells})
    clauses = []
    for _ in range(draw(st.integers(0, 3))):
        sup = draw(st.lists(st.sampled_from(window), min_size=1, max_size=len(window), unique=True))
        clauses.append(Pattern.from_mapping({c: draw(st.integers(0, q - 1)) for c in sup}))
    return SftSpec(g, alphabet, window, clauses)


@settings(max_examples=60, deadline=None)
@given(specs())
def test_parse_print_parse(X):
    Y = parse_spec(print_spec(X))
    assert Y == X
    assert parse_spec(print_spec(Y)) == Y


def test_pattern_json():
    X = golden_mean()
    p = parse_pattern("{(0):1, (2):0}", X.group, X.alphabet)
    obj = pattern_to_json(p, X.alphabet)
    assert obj == {"cells": [[0], [2]], "values": ["1", "0"]}
    assert pattern_from_json(obj, X) == p
    assert pattern_from_json("010", X) == Pattern.from_word([0, 1, 0])
    with pytest.raises(ParseError):
        pattern_from_json({"cells": [[0]], "values": []}, X)


class TestReports:
    payload = {"b": (1, 2), "a": {"h": math.log(2), "lo": -math.inf}, "n": float("nan")}

    def test_json(self):
        text = emit_report(self.payload)
        assert text == emit_report(dict(reversed(list(self.payload.items()))))
        obj = json.loads(text)
        assert obj["a"] == {"h": 0.693147181, "lo": "-inf"} and obj["b"] == [1, 2]
        assert text.endswith("\n") and "\r" not in text

    def test_table(self):
        text = emit_report(self.payload, "table")
        assert text.splitlines() == ["a.h = 0.693147181", "a.lo = -inf", "b = [1,2]", "n = nan"]

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit_report({}, "xml")
