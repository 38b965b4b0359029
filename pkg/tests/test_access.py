import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from crtshare.access import (
    LevelStructure,
    authorized_conjunctive,
    authorized_disjunctive,
    deficient_levels,
)
from crtshare.errors import InvalidStructure

from support import all_structures

EX2 = LevelStructure((4, 2), (2, 3))


def test_disjunctive_examples():
    assert authorized_disjunctive({1, 2}, EX2) == 1
    assert authorized_disjunctive({5, 6}, EX2) is None
    assert authorized_disjunctive(set(), EX2) is None
    assert authorized_disjunctive({1, 5, 6}, EX2) == 2


def test_bank_example():
    bank = LevelStructure((3, 4), (2, 3))  # vice presidents, then tellers
    assert authorized_conjunctive({1, 2, 4}, bank)
    assert not authorized_conjunctive({1, 4, 5}, bank)
    assert not authorized_conjunctive({4, 5, 6}, bank)
    assert authorized_disjunctive({1, 4, 5}, bank) == 2
    assert authorized_disjunctive({4, 5, 6}, bank) == 2  # disjunctive: three tellers suffice
    assert authorized_disjunctive({1, 4}, bank) is None


def test_single_level_variants_coincide():
    L = LevelStructure((5,), (3,))
    for r in range(6):
        for A in itertools.combinations(range(1, 6), r):
            assert authorized_conjunctive(A, L) == (authorized_disjunctive(A, L) is not None)


def test_structure_validation():
    for sizes, ts in [((2, 2), (2, 2)), ((2, 2), (3, 2)), ((1,), (2,)), ((0, 2), (1, 2)), ((2,), (0,)), ((2, 2), (1,))]:
        with pytest.raises(InvalidStructure):
            LevelStructure(sizes, ts)


def test_explicit_assignment():
    L = LevelStructure.from_levels({1: 2, 2: 1, 3: 2}, (1, 2))
    assert L.members(1) == (2,)
    assert L.members(2) == (1, 3)
    assert L.prefix(2) == (1, 2, 3)
    assert L.level_of(3) == 2
    assert L.usable({1, 3}, 1) == ()
    assert authorized_disjunctive({2}, L) == 1
    assert authorized_disjunctive({1, 3}, L) == 2


def direct_disjunctive(A, L):
    # set-builder form: some i with |A & (L_1 u ... u L_i)| >= t_i; smallest such i
    for i in range(1, L.m + 1):
        U = {k for k in range(1, L.n + 1) if L.level_of(k) <= i}
        if len(set(A) & U) >= L.thresholds[i - 1]:
            return i
    return None


def direct_conjunctive(A, L):
    return all(
        len(set(A) & {k for k in range(1, L.n + 1) if L.level_of(k) <= i}) >= L.thresholds[i - 1]
        for i in range(1, L.m + 1)
    )


def test_exhaustive_against_set_definitions():
    checked = 0
    for L in all_structures(8, 3):
        for mask in range(1 << L.n):
            A = {k + 1 for k in range(L.n) if mask >> k & 1}
            assert authorized_disjunctive(A, L) == direct_disjunctive(A, L)
            assert authorized_conjunctive(A, L) == direct_conjunctive(A, L)
            assert (not deficient_levels(A, L)) == direct_conjunctive(A, L)
            checked += 1
    assert checked > 10_000


structures = st.sampled_from(list(all_structures(7, 3)))


@given(structures, st.data())
def test_disjunctive_monotone(L, data):
    ks = list(range(1, L.n + 1))
    A = set(data.draw(st.lists(st.sampled_from(ks), unique=True)))
    B = A | set(data.draw(st.lists(st.sampled_from(ks), unique=True)))
    a, b = authorized_disjunctive(A, L), authorized_disjunctive(B, L)
    if a is not None:
        assert b is not None and b <= a


@given(structures, st.data())
def test_conjunctive_implies_disjunctive(L, data):
    A = set(data.draw(st.lists(st.sampled_from(range(1, L.n + 1)), unique=True)))
    if authorized_conjunctive(A, L):
        assert authorized_disjunctive(A, L) is not None
