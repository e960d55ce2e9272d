import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from addcomb.groups import GroupSpec
from addcomb.sumsets import (Verdict, controls, difference_set, doubling_constant, interval,
                             is_k_approximate, is_k_approximate_integers, iterated, ruzsa_cover,
                             sumset)


def oracle_sumset(A, B, G):
    return sorted({int(G.add(a, b)) for a in A for b in B})


def test_interval_sumset():
    G = GroupSpec.cyclic(100)
    A = interval(-2, 2, G)
    S = sumset(A, A, G)
    assert len(S) == 9 and sorted(S.tolist()) == interval(-4, 4, G)


def test_subgroup_closed():
    G = GroupSpec.vector(2, 5)
    H = list(range(8))
    assert sumset(H, H, G).tolist() == H
    assert doubling_constant(H, G) == 1


@given(st.sets(st.integers(0, 255), min_size=1, max_size=40),
       st.sets(st.integers(0, 255), min_size=1, max_size=40))
def test_sumset_matches_double_loop(A, B):
    G = GroupSpec.vector(2, 8)
    assert sumset(A, B, G).tolist() == oracle_sumset(A, B, G)
    C = GroupSpec.cyclic(256)
    assert sumset(A, B, C).tolist() == oracle_sumset(A, B, C)
    assert difference_set(A, B, C).tolist() == sorted({(a - b) % 256 for a in A for b in B})


def test_iterated():
    G = GroupSpec.cyclic(50)
    A = [0, 1]
    assert iterated(A, 4, G).tolist() == [0, 1, 2, 3, 4]
    assert iterated(A, 1, G).tolist() == A


@pytest.mark.parametrize("N", [1, 3, 10])
def test_doubling_of_interval(N):
    G = GroupSpec.cyclic(10 * N)
    assert doubling_constant(interval(-N, N, G), G) == Fraction(4 * N + 1, 2 * N + 1)


def test_doubling_empty_rejected():
    with pytest.raises(ValueError):
        doubling_constant([], GroupSpec.cyclic(4))


def check_cover(A, B, X, G):
    assert len(X) <= len(sumset(A, B, G)) // len(B)
    assert set(A) <= set(sumset(X, difference_set(B, B, G), G).tolist())
    translates = [set(sumset([x], B, G).tolist()) for x in X]
    for s, t in itertools.combinations(translates, 2):
        assert not s & t


@given(st.sets(st.integers(0, 255), min_size=1, max_size=60),
       st.sets(st.integers(0, 255), min_size=1, max_size=20))
def test_ruzsa_cover_postconditions(A, B):
    G = GroupSpec.vector(2, 8)
    check_cover(sorted(A), sorted(B), ruzsa_cover(A, B, G), G)


def test_ruzsa_cover_examples():
    G = GroupSpec.vector(2, 4)
    H = [0, 1, 2, 3]
    assert len(ruzsa_cover(H, H, G)) == 1
    A, B = [1, 2], [0, 1, 2, 3, 5]
    X = ruzsa_cover(A, B, G)
    assert X == [1]
    check_cover(A, B, X, G)


@pytest.mark.parametrize("N", [5, 50, 500])
def test_interval_is_three_approximate(N):
    cert = is_k_approximate_integers(range(-N, N + 1), 3)
    assert cert.verdict is Verdict.YES
    assert len(cert.translates) <= 3 and cert.modulus > 8 * N


def test_interval_cover_is_valid():
    G = GroupSpec.cyclic(401)
    A = interval(-20, 20, G)
    cert = is_k_approximate(A, 3, G)
    assert set(sumset(A, A, G).tolist()) <= set(sumset(cert.translates, A, G).tolist())


def test_subgroup_is_one_approximate():
    G = GroupSpec.vector(2, 4)
    cert = is_k_approximate([0, 1, 2, 3], 1, G)
    assert cert.verdict is Verdict.YES and cert.translates == [0]


def test_non_symmetric_is_rejected():
    G = GroupSpec.cyclic(20)
    cert = is_k_approximate([1, 2, 3], 5, G)
    assert cert.verdict is Verdict.NO and cert.method == "symmetry"


def test_k_one_forces_no_growth(rng):
    G = GroupSpec.cyclic(30)
    for _ in range(30):
        A = set(rng.choice(30, int(rng.integers(1, 8)), replace=False).tolist())
        A = sorted(A | {(-a) % 30 for a in A})
        cert = is_k_approximate(A, 1, G)
        if cert.verdict is Verdict.YES:
            assert len(sumset(A, A, G)) == len(A)


def test_controls_examples():
    G = GroupSpec.vector(2, 6)
    H = list(range(4))
    assert controls(H, H, 1, G).translates == [0]
    assert controls(list(range(8)), H, 2, G).translates == [0]
    cosets = [1 << 2, 2 << 2, 5 << 2, 9 << 2, 13 << 2]
    A = sorted(h ^ c for c in cosets for h in H)
    cert = controls(H, A, 5, G)
    assert cert.verdict is Verdict.YES and len(cert.translates) == 5
    assert controls(H, A, 4, G).verdict is Verdict.NO


def test_controls_monotone_in_k(rng):
    G = GroupSpec.cyclic(24)
    for _ in range(20):
        A = rng.choice(24, 6, replace=False).tolist()
        B = rng.choice(24, 8, replace=False).tolist()
        yes = [controls(B, A, K, G).verdict is Verdict.YES for K in (2, 3, 4, 6)]
        assert yes == sorted(yes)


def test_cardinality_clause():
    G = GroupSpec.cyclic(10)
    assert controls(list(range(5)), [0], 3, G).verdict is Verdict.NO
