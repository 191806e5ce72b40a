import math
import random

import pytest

import oracles
from subshift.catalog import Z, Z2, full_shift_on, golden_mean, hard_square, two_fixed_points, words_sft
from subshift.embed import (
    CONJUGATE, EmbedError, construct_embedding_1d, finite_conjugacy, fullshift_partition_check,
    krieger_check, margin_n0, orbit_census, pair_graph, primitive_vectors, replay_certificate,
    verify_injectivity, z2_fullshift_check,
)
from subshift.group import GroupError
from subshift.patterns import SftSpec, SlidingBlockCode
from subshift.periodic import periodic_points
from subshift.subgroups import Subgroup, enumerate_subgroups

G = golden_mean()
F2 = full_shift_on(Z, 2)
X3 = words_sft("012", ["02", "10", "11", "21", "22"])


def code(fn, window, src="01", tgt="01"):
    return SlidingBlockCode.from_function(Z, src, tgt, window, fn)


class TestKrieger:
    def test_golden_into_two(self):
        r = krieger_check(G, 2, 12)
        assert r.verdict == "YES" and r.witness is None
        qs = {row.subgroup: row.evidence for row in r.rows}
        assert qs["6"]["q_X"] == 12 and qs["6"]["q_Y"] == 54

    def test_full_into_golden(self):
        r = krieger_check(F2, G, 12)
        assert r.verdict == "NO" and r.witness.subgroup == "0"

    def test_two_fixed_points(self):
        r = krieger_check(two_fixed_points(), G, 12)
        assert r.verdict == "NO" and r.witness.evidence == {"q_X": 2, "q_Y": 1}

    def test_conjugacy_branch(self):
        r = krieger_check(F2, 2, 8)
        assert r.verdict == "YES" and r.rows[0].branch == CONJUGATE

    def test_antisymmetric(self):
        assert krieger_check(G, 2, 10).verdict == "YES"
        assert krieger_check(F2, G, 10).verdict == "NO"

    def test_rank_two_rejected(self):
        with pytest.raises(GroupError):
            krieger_check(hard_square(), 2, 4)

    def test_margin(self):
        n0 = margin_n0(2, (1 + 5 ** 0.5) / 2, 2)
        assert n0 is not None
        for n in range(n0, n0 + 50):
            assert 2 * ((1 + 5 ** 0.5) / 4) ** n + 2 * 2 ** (-n / 2) <= 1
        assert margin_n0(2, 2.0, 2) is None


class TestZ2Battery:
    def test_hard_square(self):
        r = z2_fullshift_check(hard_square(), 2, 6, 3, 4)
        assert r.verdict == "YES"
        h = r.rows[0].evidence["h_X"]
        assert h["lower"] <= 0.40749 <= h["upper"] < math.log(2)

    def test_three_symbols(self):
        r = z2_fullshift_check(full_shift_on(Z2, 3), 2, 4, 2, 2)
        assert r.verdict == "NO" and r.witness.subgroup == "0"

    def test_identity(self):
        r = z2_fullshift_check(full_shift_on(Z2, 2), 2, 4, 2, 2)
        assert r.verdict == "YES" and r.rows[0].branch == CONJUGATE

    def test_rank_one_rejected(self):
        with pytest.raises(GroupError):
            z2_fullshift_check(G, 2, 4, 2, 2)

    def test_partition(self):
        assert all(fullshift_partition_check(2, s) for s in enumerate_subgroups(8, Z2))

    def test_primitive_vectors(self):
        vs = primitive_vectors(3)
        assert all(math.gcd(a, b) == 1 and a * a + b * b <= 9 for a, b in vs)
        assert (1, 0) in vs and (2, 1) in vs and (2, 2) not in vs


class TestFiniteConjugacy:
    s = Subgroup.from_generators([(2, 0), (0, 2)], Z2)

    def test_hard_square_vs_full(self):
        P = periodic_points(hard_square(), self.s, True)
        Q = periodic_points(full_shift_on(Z2, 2), self.s, True)
        assert len(P) == 4 and len(Q) == 8
        census = orbit_census(P)
        assert list(map(len, census.values())) == [1]
        assert finite_conjugacy(P, Q)[0] is False

    def test_reflexive(self):
        P = periodic_points(hard_square(), self.s, True)
        ok, match = finite_conjugacy(P, P)
        assert ok and all(k == v for k, v in match.items())

    def test_fixed_points(self):
        one = Subgroup.from_generators([(1, 0), (0, 1)], Z2)
        P = periodic_points(hard_square(), one)
        assert finite_conjugacy(P, P)[0]

    def test_equivalence(self):
        s = Subgroup.from_generators([(3, 0), (0, 1)], Z2)
        X = hard_square()
        Y = SftSpec(Z2, ["0", "1"], [(0, 0), (1, 0), (0, 1)], [c for c in X.clauses][:1])
        P, Q = periodic_points(X, s, True), periodic_points(Y, s, True)
        R = periodic_points(X, s, True)
        assert finite_conjugacy(P, R)[0] and finite_conjugacy(R, P)[0]
        assert finite_conjugacy(P, Q)[0] == finite_conjugacy(Q, P)[0]

    def test_equivariant_matching(self):
        s = Subgroup.from_generators([(3, 0), (0, 1)], Z2)
        P = periodic_points(hard_square(), s, True)
        ok, match = finite_conjugacy(P, P)
        assert ok and sorted(match) == sorted(P.configs)

    def test_mismatched(self):
        P = periodic_points(hard_square(), self.s)
        Q = periodic_points(hard_square(), Subgroup.from_generators([(1, 0), (0, 2)], Z2))
        with pytest.raises(GroupError):
            finite_conjugacy(P, Q)


class TestInjectivity:
    def test_identity(self):
        r = verify_injectivity(F2, code(lambda v: v[0], [(0,)]))
        assert r.injective and r.window == ((0,),)

    def test_xor(self):
        r = verify_injectivity(F2, code(lambda v: v[0] ^ v[1], [(0,), (1,)]), 4)
        assert r.injective is False and r.counterexample

    def test_pair_graph_shift_code(self):
        shift = code(lambda v: v[1], [(0,), (1,)])
        assert not pair_graph(F2, shift)["offdiag"]
        assert verify_injectivity(F2, shift).injective


class TestConstructor:
    def test_golden(self):
        art = construct_embedding_1d(G, 2, 8, seed=7)
        rep = replay_certificate(G, art)
        assert rep["window_check"] == art.transcript["window_check"]
        assert rep["periodic"] == art.transcript["periodic"]
        assert len(art.injectivity_window) <= 20

    def test_recoding(self):
        art = construct_embedding_1d(X3, 2, 8, seed=7)
        assert not pair_graph(X3, art.code)["offdiag"]
        assert replay_certificate(X3, art)["periodic"] == art.transcript["periodic"]

    def test_single_fixed_point(self):
        art = construct_embedding_1d(SftSpec(Z, "0", [(0,)], []), 2)
        assert set(art.code.table.values()) == {0}

    def test_identity(self):
        art = construct_embedding_1d(F2, 2)
        assert all(k[0] == v for k, v in art.code.table.items()) and len(art.code.window) == 1

    def test_stabilizers_preserved(self):
        art = construct_embedding_1d(X3, 2, 6, seed=3)
        cw = [w[0] for w in art.code.window]
        forb = {(0, 2), (1, 0), (1, 1), (2, 1), (2, 2)}
        for n in range(1, 7):
            for w in oracles.cyclic_words(3, n, forb):
                y = tuple(art.code.lookup(tuple(w[(i + c) % n] for c in cw)) for i in range(n))
                assert oracles.least_period(y) == oracles.least_period(w)

    def test_no_embedding(self):
        with pytest.raises(EmbedError):
            construct_embedding_1d(full_shift_on(Z, 3), 2)

    def test_deterministic(self):
        a = construct_embedding_1d(X3, 2, 8, seed=11).as_dict()
        b = construct_embedding_1d(X3, 2, 8, seed=11).as_dict()
        assert a == b
