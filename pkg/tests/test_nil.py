from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from addcomb.groups import DenseFn, GroupSpec
from addcomb.nil import (BracketPhase, HeisenbergElem, VerticalCharacter, bracket_eval,
                         bracket_sequence, bridge_check, bridge_terms, check_commutator_identities,
                         correlate, e, heis_comm, heis_reduce, psi_phase)

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=12)
elems = st.builds(HeisenbergElem, fractions, fractions, fractions)


def as_matrix(g):
    return np.array(g.matrix(), dtype=object)


def test_multiplication_is_matrix_product():
    g = HeisenbergElem(Fraction(1, 3), 2, Fraction(-1, 2))
    h = HeisenbergElem(-1, Fraction(5, 7), 3)
    assert (as_matrix(g).dot(as_matrix(h)) == as_matrix(g * h)).all()
    assert g * g.inverse() == HeisenbergElem.identity()


def test_commutator_examples():
    g, h = HeisenbergElem(1, 0, 0), HeisenbergElem(0, 1, 0)
    assert heis_comm(g, h) == HeisenbergElem(0, 0, 1)
    assert heis_comm(g, g) == HeisenbergElem.identity()


@given(elems, elems, elems, st.integers(-20, 20))
def test_identities_exact(x, y, z, n):
    assert check_commutator_identities(x, y, n, z).passed
    assert heis_comm(heis_comm(x, y), z) == HeisenbergElem.identity()
    assert (x * y) * z == x * (y * z)


def test_power_zero():
    g = HeisenbergElem(Fraction(2, 3), 1, 0)
    assert g ** 0 == HeisenbergElem.identity()
    assert check_commutator_identities(g, HeisenbergElem(1, Fraction(1, 5), 2), 0).passed
    g5 = g * g * g * g * g
    assert g ** 5 == g5


@given(elems)
def test_reduce_round_trip(g):
    frac, integral = heis_reduce(g)
    assert frac * integral == g and integral.is_integral()
    half = Fraction(1, 2)
    assert all(-half < t <= half for t in (frac.a, frac.b, frac.c))


def test_reduce_examples():
    assert heis_reduce(HeisenbergElem(3, -2, 7))[0] == HeisenbergElem.identity()
    g = HeisenbergElem(Fraction(1, 3), 0, 0)
    assert heis_reduce(g) == (g, HeisenbergElem.identity())
    g = HeisenbergElem(Fraction(5, 4), Fraction(1, 2), Fraction(7, 3))
    frac, integral = heis_reduce(g)
    assert frac * integral == g and integral == HeisenbergElem(1, 0, 2)


def test_vertical_character():
    chi = VerticalCharacter(3)
    assert chi(HeisenbergElem(0, 0, 5)) == pytest.approx(1)
    assert chi(HeisenbergElem(0, 0, Fraction(1, 3))) == pytest.approx(1)
    assert chi(HeisenbergElem(0, 0, Fraction(1, 4))) == pytest.approx(-1j)
    with pytest.raises(ValueError):
        chi(HeisenbergElem(1, 0, 0))


def test_bracket_examples():
    assert bracket_eval(BracketPhase(), 7) == 1
    phase = BracketPhase(deltas=[Fraction(1, 2)], etas=[Fraction(1, 2)])
    assert bracket_eval(phase, 1) == pytest.approx(e(Fraction(1, 4)))
    flat = BracketPhase([Fraction(1, 3)], [0], [0])
    assert np.allclose(bracket_sequence(flat, 10), 1)
    assert np.allclose(np.abs(bracket_sequence(BracketPhase([Fraction(2, 7)], [Fraction(1, 3)],
                                                            [Fraction(3, 5)]), 20)), 1)


def test_bracket_direct_formula():
    a, b, c, d, h = Fraction(2, 3), Fraction(3, 11), Fraction(5, 13), Fraction(1, 7), Fraction(2, 9)
    phase = BracketPhase([a], [b], [c], [d], [h])
    def fp(t):
        return t - np.ceil(float(t) - 0.5)
    for n in range(30):
        arg = float(a) * fp(b * n) * fp(c * n) + float(d) * fp(h * n)
        assert bracket_eval(phase, n) == pytest.approx(np.exp(2j * np.pi * arg))


def test_bracket_length_mismatch():
    with pytest.raises(ValueError):
        BracketPhase([1], [1, 2], [1])


def test_psi_phase_examples():
    assert psi_phase([0, 0], [Fraction(1, 3), 1], [0, Fraction(1, 2)], 9) == 0
    assert psi_phase([1], [0], [Fraction(1, 4)], 5) == Fraction(-1, 4)
    with pytest.raises(ValueError):
        psi_phase([1], [0, 1], [0], 1)


def test_bridge_identity_family():
    for a in (Fraction(1, 7), Fraction(3, 10), Fraction(-2, 9)):
        for m in (1, 2, 5):
            for N in (3, 8):
                g = HeisenbergElem(a, Fraction(1, 3), Fraction(1, 5))
                for x in range(1, N + 1):
                    chk = bridge_check(g, m, N, x)
                    assert chk.exact and chk.deviation <= 1e-9


def test_bridge_terms_one_parameter():
    g = HeisenbergElem(Fraction(2, 5), 0, 0)
    t = bridge_terms(g, 3, 4)
    assert t.betas[1] == 0 and t.constant == 0
    for x in range(1, 5):
        assert bridge_check(g, 3, 4, x).exact


def test_correlate_examples(rng):
    G = GroupSpec.cyclic(12)
    vals = np.exp(2j * np.pi * rng.random(12)) * rng.random(12)
    f = DenseFn(G, vals)
    assert correlate(f, vals) == pytest.approx(np.mean(np.abs(vals) ** 2))
    centred = DenseFn(G, vals - vals.mean())
    assert abs(correlate(centred, lambda n: 1)) <= 1e-12
    N = 15
    f = DenseFn(GroupSpec.cyclic(N), [e(Fraction(n * n, N)) for n in range(N)])
    phase = BracketPhase([Fraction(1)], [Fraction(1, N)], [Fraction(1, N)])
    direct = np.mean([f.values[n] * np.conj(bracket_eval(phase, n)) for n in range(N)])
    assert correlate(f, phase) == pytest.approx(direct)
    assert abs(correlate(f, phase)) <= 1 + 1e-12
