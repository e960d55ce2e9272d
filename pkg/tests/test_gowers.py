import numpy as np
import pytest

from addcomb.fourier import transform
from addcomb.gowers import (gowers_norm, gowers_norm_fast, gowers_norm_naive, gowers_power_naive,
                            monotonicity_check, mult_derivative)
from addcomb.groups import DenseFn, GroupSpec, indicator
from addcomb.quadratic import QuadPolyF2

GROUPS = [GroupSpec.vector(2, 4), GroupSpec.cyclic(12), GroupSpec.vector(3, 2),
          GroupSpec.product([GroupSpec.cyclic(4), GroupSpec.vector(2, 2)])]


def random_bounded(rng, G):
    r = np.sqrt(rng.random(G.cardinality))
    return DenseFn(G, r * np.exp(2j * np.pi * rng.random(G.cardinality)), bounded=True)


def test_derivative_examples(rng):
    G = GroupSpec.vector(2, 4)
    f = random_bounded(rng, G)
    assert np.allclose(mult_derivative(f, 0).values, np.abs(f.values) ** 2)
    b = 0b1011
    walsh = DenseFn(G, [(-1) ** bin(b & x).count("1") for x in range(16)])
    for h in range(16):
        d = mult_derivative(walsh, h).values
        assert np.allclose(d, (-1) ** bin(b & h).count("1"))


def test_quadratic_phase_derivative_is_linear_phase(rng):
    psi = QuadPolyF2.from_matrix(rng.integers(0, 2, (4, 4)), rng.integers(0, 2, 4))
    f = psi.phase()
    for h in range(16):
        spec = np.abs(transform(mult_derivative(f, h)).coefficients)
        assert np.isclose(spec.max(), 1.0)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_constant_one(k):
    f = DenseFn(GroupSpec.vector(2, 3), np.ones(8))
    assert gowers_norm_naive(f, k) == pytest.approx(1)
    assert gowers_norm_fast(f, k) == pytest.approx(1)


def test_quadratic_phase_has_u3_norm_one(rng):
    for _ in range(5):
        psi = QuadPolyF2.from_matrix(rng.integers(0, 2, (5, 5)), rng.integers(0, 2, 5), 1)
        assert gowers_norm_naive(psi.phase(), 3) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("G", GROUPS)
@pytest.mark.parametrize("k", [1, 2, 3])
def test_fast_matches_naive(G, k, rng):
    for _ in range(4):
        f = random_bounded(rng, G)
        assert abs(gowers_norm_fast(f, k) - gowers_norm_naive(f, k)) <= 1e-9


def test_fast_matches_naive_u4_small(rng):
    f = random_bounded(rng, GroupSpec.vector(2, 3))
    assert abs(gowers_norm_fast(f, 4) - gowers_norm_naive(f, 4)) <= 1e-9


def test_subgroup_indicator(rng):
    G = GroupSpec.vector(2, 6)
    H = [x for x in range(64) if x < 8]
    f = indicator(H, G)
    for k in (1, 2, 3):
        # density 1/8 subgroup: every cube in H, so ||1_H||^{2^k} = (1/8)^{k+1}
        assert gowers_norm_fast(f, k) == pytest.approx((1 / 8) ** ((k + 1) / 2 ** k))
        assert gowers_norm_fast(f, k) == pytest.approx(gowers_norm_naive(f, k))


def test_u2_spectral_identity(rng):
    for G in GROUPS:
        f = random_bounded(rng, G)
        s = np.sum(np.abs(transform(f).coefficients) ** 4)
        assert abs(gowers_power_naive(f, 2).real - s) <= 1e-9


def test_monotonicity(rng):
    assert tuple(monotonicity_check(DenseFn(GroupSpec.cyclic(8), np.ones(8)))) == (
        pytest.approx(1), pytest.approx(1), pytest.approx(1), True)
    G = GroupSpec.cyclic(20)
    S = [1, 4, 5, 9, 13]
    u1, u2, u3, ok = monotonicity_check(indicator(S, G))
    assert u1 == pytest.approx(len(S) / 20) and ok
    for _ in range(20):
        assert monotonicity_check(random_bounded(rng, GroupSpec.vector(2, 4))).passed


def test_method_dispatch_and_caps():
    f = DenseFn(GroupSpec.cyclic(4), np.ones(4))
    assert gowers_norm(f, 2, "naive") == pytest.approx(1)
    with pytest.raises(ValueError):
        gowers_norm(f, 2, "other")
    with pytest.raises(ValueError):
        gowers_norm_naive(DenseFn(GroupSpec.vector(2, 9), np.ones(512)), 4)
    with pytest.raises(ValueError):
        gowers_norm_fast(f, 5)
