import pytest
from hypothesis import given, strategies as st

from subshift.catalog import Z, Z2
from subshift.group import GroupError, GroupSpec
from subshift.subgroups import (
    INFINITE, Subgroup, enumerate_subgroups, fundamental_domain, hnf, overgroups, parse_subgroup,
    subgroup_canonicalize, subgroup_index,
)


def sigma(n):
    return sum(d for d in range(1, n + 1) if n % d == 0)


def test_hnf_example():
    s = subgroup_canonicalize([(1, 1), (2, 0)], Z2)
    assert s.rows == ((1, 1), (0, 2)) and subgroup_index(s) == 2


def test_index_examples():
    assert subgroup_index(Subgroup.from_generators([(2, 0), (0, 2)], Z2)) == 4
    assert subgroup_index(Subgroup.from_generators([(3,)], Z)) == 3
    assert Subgroup.from_generators([(1, 0)], Z2).index == INFINITE


@pytest.mark.parametrize("n", range(1, 13))
def test_count_matches_divisor_sum(n):
    assert len(enumerate_subgroups(n, Z2, exact=True)) == sigma(n)


def test_small_lists():
    assert len(enumerate_subgroups(2, Z2, exact=True)) == 3
    assert [s.index for s in enumerate_subgroups(3, Z)] == [1, 2, 3]


def test_enumeration_distinct():
    subs = enumerate_subgroups(8, Z2)
    assert len(set(subs)) == len(subs)


def test_fundamental_domains():
    assert fundamental_domain(Subgroup.from_generators([(3,)], Z)) == ((0,), (1,), (2,))
    assert set(fundamental_domain(Subgroup.from_generators([(2, 0), (0, 2)], Z2))) == {
        (0, 0), (0, 1), (1, 0), (1, 1)}
    assert len(fundamental_domain(Subgroup.from_generators([(1, 1), (0, 2)], Z2))) == 2


def test_infinite_index_domain_rejected():
    with pytest.raises(GroupError):
        fundamental_domain(Subgroup.from_generators([(1, 0)], Z2))


def test_torsion_subgroup():
    g = GroupSpec(1, (2,))
    s = Subgroup.from_generators([(2, 0), (0, 1)], g)
    assert s.index == 2
    assert s.contains((4, 1)) and not s.contains((1, 0))


def test_rank_three_rejected():
    with pytest.raises(GroupError):
        enumerate_subgroups(2, GroupSpec(3))


def test_parse():
    assert parse_subgroup("2,0;0,2", Z2) == Subgroup.from_generators([(2, 0), (0, 2)], Z2)


def test_overgroups_of_torus():
    s = Subgroup.from_generators([(2, 0), (0, 2)], Z2)
    ov = overgroups(s)
    assert all(h.contains_subgroup(s) and h != s for h in ov)
    assert len(ov) == 4  # three index-2 lattices plus Z^2


vec = st.tuples(st.integers(-6, 6), st.integers(-6, 6))


@given(st.lists(vec, min_size=1, max_size=4))
def test_canonicalize_idempotent_and_order_free(gens):
    s = subgroup_canonicalize(gens, Z2)
    assert subgroup_canonicalize(s.rows, Z2) == s
    assert subgroup_canonicalize(list(reversed(gens)), Z2) == s
    for g in gens:
        assert s.contains(g)


@given(st.lists(vec, min_size=2, max_size=3))
def test_reduce_is_coset_representative(gens):
    s = Subgroup.from_generators(gens, Z2)
    if s.index == INFINITE:
        return
    dom = set(s.fundamental_domain())
    assert len(dom) == s.index
    for x in range(-4, 5):
        for y in range(-4, 5):
            r = s.reduce((x, y))
            assert r in dom and s.contains((x - r[0], y - r[1]))
