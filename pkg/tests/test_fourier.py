import numpy as np
import pytest
from hypothesis import given, strategies as st

from addcomb.fourier import (character, fwht, inverse, large_coeffs, large_sieve_check,
                             min_separation, naive_transform, transform)
from addcomb.groups import DenseFn, GroupSpec


def walsh(b, n):
    x = np.arange(1 << n)
    return DenseFn(GroupSpec.vector(2, n), (-1.0) ** np.array([bin(v & b).count("1") for v in x]))


def test_constant_on_f2_cubed():
    c = transform(DenseFn(GroupSpec.vector(2, 3), np.ones(8))).coefficients
    assert c[0] == pytest.approx(1) and np.allclose(c[1:], 0)


@pytest.mark.parametrize("b", range(8))
def test_walsh_character_is_delta(b):
    c = transform(walsh(b, 3)).coefficients
    want = np.zeros(8)
    want[b] = 1
    assert np.allclose(c, want)


@pytest.mark.parametrize("G", [GroupSpec.cyclic(12), GroupSpec.vector(3, 2), GroupSpec.vector(2, 5),
                               GroupSpec.product([GroupSpec.cyclic(4), GroupSpec.vector(3, 1)])])
def test_transform_matches_naive_dft(G, rng):
    f = DenseFn(G, rng.normal(size=G.cardinality) + 1j * rng.normal(size=G.cardinality))
    fast = transform(f).coefficients
    assert np.allclose(fast, naive_transform(f), atol=1e-12)
    assert abs(np.sum(np.abs(fast) ** 2) - f.l2_sq()) <= 1e-9
    assert np.allclose(inverse(transform(f)).values, f.values)


def test_character_transform_is_delta():
    G = GroupSpec.product([GroupSpec.cyclic(6), GroupSpec.vector(3, 1)])
    for xi in range(G.cardinality):
        c = transform(character(G, xi)).coefficients
        assert abs(c[xi] - 1) < 1e-12 and np.sum(np.abs(c)) == pytest.approx(1)


@given(st.lists(st.floats(-5, 5), min_size=16, max_size=16))
def test_fwht_is_involution_up_to_scale(vals):
    a = np.array(vals)
    assert np.allclose(fwht(fwht(a)) / 16, a)


def test_large_coeffs_examples(rng):
    G = GroupSpec.vector(2, 4)
    f = DenseFn(G, rng.uniform(-1, 1, 16), bounded=True)
    assert len(large_coeffs(f, 0.5)) <= 4
    hits = large_coeffs(walsh(5, 4), 0.9)
    assert len(hits) == 1 and hits[0][0] == 5 and abs(hits[0][1] - 1) < 1e-12


def test_large_coeffs_pm1_on_f2_8_against_naive(rng):
    G = GroupSpec.vector(2, 8)
    f = DenseFn(G, rng.choice([-1.0, 1.0], 256), bounded=True)
    want = sorted(int(i) for i in np.nonzero(np.abs(naive_transform(f)) >= 0.5 - 1e-12)[0])
    assert sorted(i for i, _ in large_coeffs(f, 0.5)) == want


def test_large_sieve_worked_example():
    lhs, rhs, ok = large_sieve_check(np.ones(10), [0.0], delta=0.5)
    assert lhs == pytest.approx(100) and rhs == pytest.approx(120) and ok


def test_large_sieve_single_point_cauchy_schwarz(rng):
    f = rng.normal(size=20) + 1j * rng.normal(size=20)
    res = large_sieve_check(f, [0.37])
    assert res.lhs <= 20 * np.sum(np.abs(f) ** 2) + 1e-9 and res.passed


def test_large_sieve_against_direct_sum(rng):
    for _ in range(30):
        M = int(rng.integers(1, 65))
        f = rng.normal(size=M) + 1j * rng.normal(size=M)
        th = sorted(set(np.round(rng.random(int(rng.integers(1, 9))), 5).tolist()))
        res = large_sieve_check(f, th)
        direct = sum(abs(sum(f[y - 1] * np.exp(2j * np.pi * y * t) for y in range(1, M + 1))) ** 2
                     for t in th)
        assert res.lhs == pytest.approx(direct) and res.passed


def test_large_sieve_rejects_unseparated_points():
    with pytest.raises(ValueError):
        large_sieve_check(np.ones(4), [0.1, 0.15], delta=0.2)


def test_min_separation_wraps():
    assert min_separation([0.05, 0.95]) == pytest.approx(0.1)
