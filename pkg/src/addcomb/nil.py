"""Heisenberg group arithmetic, bracket phases and correlations over Z/NZ.

Elements (a, b, c) stand for the matrix with rows (1, a, c), (0, 1, b),
(0, 0, 1).  All group arithmetic is exact over the rationals; reals appear
only when a character or phase is evaluated.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .groups import DenseFn
from .progressions import as_fraction, frac_part

HALF = Fraction(1, 2)


def e(t) -> complex:
    """exp(2 pi i t), reducing rationals mod 1 first so large arguments stay accurate."""
    if isinstance(t, Fraction):
        t = t - math.floor(t)
    return cmath.exp(2j * math.pi * float(t))


@dataclass(frozen=True)
class HeisenbergElem:
    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))

    @classmethod
    def identity(cls) -> "HeisenbergElem":
        return cls(0, 0, 0)

    def __mul__(self, o: "HeisenbergElem") -> "HeisenbergElem":
        return HeisenbergElem(self.a + o.a, self.b + o.b, self.c + o.c + self.a * o.b)

    def inverse(self) -> "HeisenbergElem":
        return HeisenbergElem(-self.a, -self.b, -self.c + self.a * self.b)

    def __pow__(self, n: int) -> "HeisenbergElem":
        n = int(n)
        return HeisenbergElem(n * self.a, n * self.b,
                              n * self.c + Fraction(n * (n - 1), 2) * self.a * self.b)

    def is_integral(self) -> bool:
        return all(t.denominator == 1 for t in (self.a, self.b, self.c))

    def is_central(self) -> bool:
        return self.a == 0 and self.b == 0

    def matrix(self) -> list[list[Fraction]]:
        return [[Fraction(1), self.a, self.c], [Fraction(0), Fraction(1), self.b],
                [Fraction(0), Fraction(0), Fraction(1)]]

    def to_json(self) -> list[str]:
        return [str(self.a), str(self.b), str(self.c)]

    @classmethod
    def from_json(cls, obj) -> "HeisenbergElem":
        return cls(*(Fraction(str(t)) for t in obj))


def heis_mul(g: HeisenbergElem, h: HeisenbergElem) -> HeisenbergElem:
    return g * h


def heis_inv(g: HeisenbergElem) -> HeisenbergElem:
    return g.inverse()


def heis_pow(g: HeisenbergElem, n: int) -> HeisenbergElem:
    return g ** n


def heis_comm(g: HeisenbergElem, h: HeisenbergElem) -> HeisenbergElem:
    """[g, h] = g h g^-1 h^-1."""
    out = g * h * g.inverse() * h.inverse()
    assert out == HeisenbergElem(0, 0, g.a * h.b - h.a * g.b)
    return out


def conjugate(h: HeisenbergElem, x: HeisenbergElem) -> HeisenbergElem:
    """h^x = x h x^-1."""
    return x * h * x.inverse()


@dataclass(frozen=True)
class IdentityCheck:
    power: bool
    product: bool
    central: bool

    @property
    def passed(self) -> bool:
        return self.power and self.product and self.central


def check_commutator_identities(x: HeisenbergElem, y: HeisenbergElem, n: int,
                                z: HeisenbergElem | None = None) -> IdentityCheck:
    """[x^n, y] = [x, y]^n, [xy, z] = [y, z]^x [x, z], and [[x, y], z] = 1, exactly."""
    z = y if z is None else z
    power = heis_comm(x ** n, y) == heis_comm(x, y) ** n
    product = heis_comm(x * y, z) == conjugate(heis_comm(y, z), x) * heis_comm(x, z)
    central = heis_comm(heis_comm(x, y), z) == HeisenbergElem.identity()
    return IdentityCheck(power, product, central)


def _round_half_down(t: Fraction) -> int:
    # the integer k with t - k in (-1/2, 1/2]
    return math.ceil(t - HALF)


def heis_reduce(g: HeisenbergElem, centre: tuple = (0, 0, 0)) -> tuple[HeisenbergElem, HeisenbergElem]:
    """Split g = {g} [g] with [g] integral and {g} in the box centred at ``centre``.

    The box is (u - 1/2, u + 1/2] x (v - 1/2, v + 1/2] x (w - 1/2, w + 1/2].
    """
    u, v, w = (as_fraction(t) for t in centre)
    m = _round_half_down(g.a - u)
    n = _round_half_down(g.b - v)
    k = _round_half_down(g.c - (g.a - m) * n - w)
    integral = HeisenbergElem(m, n, k)
    frac = HeisenbergElem(g.a - m, g.b - n, g.c - k - (g.a - m) * n)
    assert frac * integral == g
    return frac, integral


@dataclass(frozen=True)
class VerticalCharacter:
    """chi(0, 0, c) = e(m c); trivial on integer c."""
    weight: int

    def __call__(self, g: HeisenbergElem) -> complex:
        if not g.is_central():
            raise ValueError("vertical characters are defined on the centre only")
        return e(self.weight * g.c)

    def phase(self, g: HeisenbergElem) -> Fraction:
        if not g.is_central():
            raise ValueError("vertical characters are defined on the centre only")
        return frac_part(self.weight * g.c)


@dataclass(frozen=True)
class BracketPhase:
    """n -> e(sum_j alpha_j {beta_j n}{gamma_j n} + sum_k delta_k {eta_k n})."""
    alphas: tuple = ()
    betas: tuple = ()
    gammas: tuple = ()
    deltas: tuple = ()
    etas: tuple = ()

    def __post_init__(self):
        for name in ("alphas", "betas", "gammas", "deltas", "etas"):
            object.__setattr__(self, name, tuple(as_fraction(t) for t in getattr(self, name)))
        if not len(self.alphas) == len(self.betas) == len(self.gammas):
            raise ValueError("alphas, betas, gammas must have equal length")
        if len(self.deltas) != len(self.etas):
            raise ValueError("deltas and etas must have equal length")

    def argument(self, n: int) -> Fraction:
        s = sum((a * frac_part(b * n) * frac_part(c * n)
                 for a, b, c in zip(self.alphas, self.betas, self.gammas)), Fraction(0))
        s += sum((d * frac_part(h * n) for d, h in zip(self.deltas, self.etas)), Fraction(0))
        return s

    def to_json(self) -> dict:
        return {k: [str(t) for t in getattr(self, k)]
                for k in ("alphas", "betas", "gammas", "deltas", "etas")}

    @classmethod
    def from_json(cls, obj: dict) -> "BracketPhase":
        return cls(*(tuple(obj.get(k, ())) for k in ("alphas", "betas", "gammas", "deltas", "etas")))


def bracket_eval(phase: BracketPhase, n: int) -> complex:
    return e(phase.argument(int(n)))


def bracket_sequence(phase: BracketPhase, N: int) -> np.ndarray:
    return np.array([bracket_eval(phase, n) for n in range(N)], dtype=np.complex128)


def psi_phase(betas: Sequence, alphas: Sequence, gammas: Sequence, x: int,
              constant=0) -> Fraction:
    """constant + sum_j beta_j {alpha_j x - gamma_j}, as an exact rational (not reduced)."""
    if not len(betas) == len(alphas) == len(gammas):
        raise ValueError("coefficient lists must have equal length")
    out = as_fraction(constant)
    for b, a, g in zip(betas, alphas, gammas):
        out += as_fraction(b) * frac_part(as_fraction(a) * int(x) - as_fraction(g))
    return out


@dataclass(frozen=True)
class BridgeTerms:
    betas: tuple[Fraction, ...]
    alphas: tuple[Fraction, ...]
    gammas: tuple[Fraction, ...]
    constant: Fraction


def bridge_terms(g: HeisenbergElem, weight: int, N: int, centre: tuple = (0, 0)) -> BridgeTerms:
    """beta, alpha, gamma with chi([g^{4N}, {g^x}]) = e(sum beta_j {alpha_j x - gamma_j} + const).

    {g^x} has first two coordinates u + {a x - u} and v + {b x - v}, and the
    commutator only sees those, giving two bracket terms.
    """
    u, v = (as_fraction(t) for t in centre[:2])
    scale = 4 * N * weight
    return BridgeTerms((scale * g.a, -scale * g.b), (g.b, g.a), (v, u),
                       scale * (g.a * v - g.b * u))


@dataclass(frozen=True)
class BridgeCheck:
    x: int
    character_side: Fraction
    psi_side: Fraction
    exact: bool
    deviation: float


def bridge_check(g: HeisenbergElem, weight: int, N: int, x: int,
                 centre: tuple = (0, 0)) -> BridgeCheck:
    chi = VerticalCharacter(weight)
    frac, _ = heis_reduce(g ** x, (centre[0], centre[1], 0))
    lhs = chi.phase(heis_comm(g ** (4 * N), frac))
    t = bridge_terms(g, weight, N, centre)
    rhs = psi_phase(t.betas, t.alphas, t.gammas, x, t.constant)
    dev = abs(chi(heis_comm(g ** (4 * N), frac)) - e(rhs))
    return BridgeCheck(x, lhs, rhs, frac_part(lhs - rhs) == 0, dev)


def correlate(f: DenseFn, sequence: Callable[[int], complex] | Sequence[complex] | BracketPhase) -> complex:
    """E_{n in Z/NZ} f(n) conj(F(n))."""
    G = f.group
    if G.kind != "cyclic":
        raise ValueError("correlate needs a function on Z/NZ")
    N = G.N
    if isinstance(sequence, BracketPhase):
        F = bracket_sequence(sequence, N)
    elif callable(sequence):
        F = np.array([complex(sequence(n)) for n in range(N)])
    else:
        F = np.asarray(sequence, dtype=np.complex128)
        if F.shape != (N,):
            raise ValueError("sequence length must equal N")
    return complex(np.mean(f.values * F.conj()))
