import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from subshift.catalog import Z, Z2, full_shift_on, golden_mean, hard_square, words_sft
from subshift.clopen import AmbientMismatch, ClopenSet
from subshift.group import make_box, make_interval_box
from subshift.patterns import (
    AlphabetError, BudgetError, Pattern, SlidingBlockCode, apply_block_code, count_local,
    forbid_pattern, is_locally_admissible, is_safe_symbol, language, language_rows, local_language,
    local_language_rows, sample_pattern,
)

I3 = [(0,), (1,), (2,)]


def iv(n, start=0):
    return [(i,) for i in range(start, start + n)]


def word_set(rows):
    return {tuple(int(v) for v in r) for r in rows}


class TestAdmissibility:
    def test_diagonal_ones(self):
        p = Pattern.from_mapping({(0, 0): 1, (1, 1): 1, (0, 1): 0, (1, 0): 0})
        assert is_locally_admissible(hard_square(), p)

    def test_forbidden_pair(self):
        assert not is_locally_admissible(hard_square(), Pattern.from_mapping({(0, 0): 1, (1, 0): 1}))

    def test_full_shift(self):
        rng = random.Random(0)
        X = full_shift_on(Z2, 3)
        for _ in range(20):
            p = Pattern.from_mapping({(i, j): rng.randrange(3) for i in range(3) for j in range(3)})
            assert is_locally_admissible(X, p)

    def test_symbol_outside_alphabet(self):
        with pytest.raises(AlphabetError):
            is_locally_admissible(golden_mean(), Pattern.from_word([0, 5]))


class TestLanguages:
    def test_golden_three(self, backend):
        got = {p.values for p in local_language(golden_mean(), I3)}
        assert got == {(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 0, 1)}

    @pytest.mark.parametrize("n,expected", [(1, 2), (2, 7), (3, 63), (4, 1234)])
    def test_hard_square_boxes(self, backend, n, expected):
        F = make_interval_box((0, 0), (n - 1, n - 1), Z2)
        assert count_local(hard_square(), F) == expected == oracles.grid_independent_sets(n)

    def test_exact_golden_equals_local(self):
        pats, exact = language(golden_mean(), I3)
        assert exact and len(pats) == 5

    def test_trim_kills_stranded_symbol(self):
        X = words_sft("ab", ["ab", "ba", "aa"])
        for n in range(1, 6):
            _, rows, exact = language_rows(X, iv(n))
            assert exact and rows.shape[0] == 1 and set(rows[0].tolist()) == {1}

    def test_full_shift_four(self):
        assert language_rows(full_shift_on(Z, 2), iv(4))[1].shape[0] == 16

    @pytest.mark.parametrize("n", range(1, 9))
    def test_exact_inside_local(self, n):
        for X in (golden_mean(), full_shift_on(Z, 2), words_sft("012", ["02", "10", "11", "21", "22"])):
            _, rows, _ = language_rows(X, iv(n))
            _, loc = local_language_rows(X, iv(n))
            assert word_set(rows) <= word_set(loc)
        _, rows, _ = language_rows(golden_mean(), iv(n))
        assert word_set(rows) == set(oracles.words(2, n, {(1, 1)}))

    @given(st.integers(1, 6), st.integers(0, 5))
    def test_restriction_consistent(self, n, extra):
        X = words_sft("012", ["01", "22"])
        small = word_set(local_language_rows(X, iv(n))[1])
        big = local_language_rows(X, iv(n + extra))[1]
        assert {tuple(int(v) for v in r[:n]) for r in big} <= small

    def test_budget(self):
        with pytest.raises(BudgetError):
            local_language_rows(full_shift_on(Z, 2), iv(12), budget=100)

    def test_backends_agree(self):
        from subshift import kernels
        if len(kernels.BACKENDS) < 2:
            pytest.skip("compiled backend not built")
        X = hard_square()
        F = make_interval_box((0, 0), (2, 3), Z2)
        before = kernels.backend_name()
        out = []
        for name in sorted(kernels.BACKENDS):
            kernels.set_backend(name)
            out.append(word_set(local_language_rows(X, F)[1]))
        kernels.set_backend(before)
        assert out[0] == out[1]


class TestBlockCodes:
    xor = SlidingBlockCode.from_function(Z, "01", "01", [(0,), (1,)], lambda v: v[0] ^ v[1])

    def test_xor(self):
        out = apply_block_code(self.xor, Pattern.from_word([0, 1, 1, 0]), I3)
        assert out.values == (1, 0, 1)

    def test_identity_and_constant(self):
        p = Pattern.from_word([1, 0, 1, 1])
        ident = SlidingBlockCode.from_function(Z, "01", "01", [(0,)], lambda v: v[0])
        const = SlidingBlockCode.from_function(Z, "01", "01", [(0,)], lambda v: 1)
        assert apply_block_code(ident, p, I3) == p.restrict(I3)
        assert apply_block_code(const, p, I3).values == (1, 1, 1)

    def test_support_too_small(self):
        with pytest.raises((KeyError, ValueError)):
            apply_block_code(self.xor, Pattern.from_word([0, 1]), I3)

    @given(st.lists(st.integers(0, 1), min_size=6, max_size=12), st.integers(-5, 5))
    def test_commutes_with_translation(self, w, v):
        p = Pattern.from_word(w)
        E = iv(len(w) - 1)
        moved = apply_block_code(self.xor, p.translate((v,), Z), [(e[0] + v,) for e in E])
        assert moved == apply_block_code(self.xor, p, E).translate((v,), Z)


class TestForbid:
    def test_full_shift_to_golden(self):
        X = forbid_pattern(full_shift_on(Z, 2), Pattern.from_word([1, 1]))
        assert len(local_language(X, I3)) == 5

    def test_already_forbidden(self):
        G = golden_mean()
        X = forbid_pattern(G, Pattern.from_word([1, 1]))
        for n in range(1, 7):
            assert word_set(language_rows(X, iv(n))[1]) == word_set(language_rows(G, iv(n))[1])

    def test_golden_without_00(self):
        X = forbid_pattern(golden_mean(), Pattern.from_word([0, 0]))
        assert language_rows(X, I3)[1].shape[0] == 2

    @settings(max_examples=25)
    @given(st.lists(st.integers(0, 1), min_size=1, max_size=3))
    def test_never_contains_forbidden(self, w):
        X = forbid_pattern(full_shift_on(Z, 2), Pattern.from_word(w))
        for r in local_language_rows(X, iv(6))[1]:
            r = tuple(int(v) for v in r)
            assert not any(r[i:i + len(w)] == tuple(w) for i in range(7 - len(w)))


class TestSafeSymbol:
    def test_examples(self):
        assert is_safe_symbol(hard_square(), 0)
        assert not is_safe_symbol(golden_mean(), 1)
        assert all(is_safe_symbol(full_shift_on(Z, 3), a) for a in range(3))

    def test_unknown_symbol(self):
        with pytest.raises(AlphabetError):
            is_safe_symbol(golden_mean(), 7)


class TestSampling:
    @given(st.integers(0, 10_000))
    @settings(max_examples=20)
    def test_samples_admissible(self, seed):
        X = hard_square()
        p = sample_pattern(X, make_box(2, Z2), random.Random(seed))
        assert p is not None and is_locally_admissible(X, p)


class TestClopen:
    G = golden_mean()

    def cyl(self, w, start=0):
        return ClopenSet.cylinder(self.G, Pattern.from_word(w, start))

    def test_no_adjacent_ones(self):
        A = self.cyl([1])
        assert A.intersection(A.shift((1,))).is_empty()

    def test_complement_involution(self):
        A = self.cyl([1, 0])
        assert A.complement().complement() == A

    def test_union_whole(self):
        assert self.cyl([1]).union(self.cyl([0])) == ClopenSet.whole(self.G)

    def test_mismatched_ambient(self):
        with pytest.raises(AmbientMismatch):
            self.cyl([1]).union(ClopenSet.whole(hard_square()))

    words = st.lists(st.integers(0, 1), min_size=1, max_size=3)

    @settings(max_examples=40)
    @given(st.lists(words, max_size=3), st.lists(words, max_size=3), st.lists(words, max_size=3))
    def test_boolean_axioms(self, a, b, c):
        def family(ws):
            out = ClopenSet.empty(self.G)
            for w in ws:
                out = out.union(self.cyl(w))
            return out
        A, B, C = family(a), family(b), family(c)
        assert A.intersection(B.union(C)) == A.intersection(B).union(A.intersection(C))
        assert A.union(B).complement() == A.complement().intersection(B.complement())
        assert A.difference(B) == A.intersection(B.complement())
        assert A.intersection(B).issubset(A) and A.issubset(A.union(B))
        assert A.shift((2,)).shift((-2,)) == A
