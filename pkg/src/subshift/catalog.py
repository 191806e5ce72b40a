"""Standard SFTs used in examples, tests and the command line."""
from __future__ import annotations

from .group import GroupSpec
from .patterns import Pattern, SftSpec, full_shift

Z = GroupSpec(1)
Z2 = GroupSpec(2)


def golden_mean() -> SftSpec:
    """Binary sequences without two adjacent 1s."""
    return SftSpec(Z, "01", [(0,), (1,)], [Pattern.from_word((1, 1))])


def hard_square() -> SftSpec:
    """Binary Z^2 configurations without horizontally or vertically adjacent 1s."""
    w = [(0, 0), (1, 0), (0, 1)]
    return SftSpec(Z2, "01", w, [
        Pattern(((0, 0), (1, 0)), (1, 1)),
        Pattern(((0, 0), (0, 1)), (1, 1)),
    ])


def full_shift_on(spec: GroupSpec, q: int) -> SftSpec:
    return full_shift(spec, [str(i) for i in range(q)])


def two_fixed_points() -> SftSpec:
    """The SFT {0^inf, 1^inf}."""
    return SftSpec(Z, "01", [(0,), (1,)], [Pattern.from_word((0, 1)), Pattern.from_word((1, 0))])


def words_sft(alphabet: str, forbidden: list) -> SftSpec:
    """1D SFT forbidding the given words (as strings over ``alphabet``)."""
    L = max(len(w) for w in forbidden)
    clauses = [Pattern.from_word([alphabet.index(c) for c in w]) for w in forbidden]
    return SftSpec(Z, alphabet, [(i,) for i in range(L)], clauses)
