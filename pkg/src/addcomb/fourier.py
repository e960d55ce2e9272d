"""Fourier analysis on the supported groups.

Transforms are normalised as averages, ``fhat(xi) = E_x f(x) conj(chi_xi(x))``,
and the inverse sums over the dual.  The dual group is identified with the
group itself through the canonical index encoding; on a cyclic factor of order
r the character at xi is x -> e(xi x / r).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .groups import DenseFn, GroupSpec

PARSEVAL_TOL = 1e-9


def fwht(a: np.ndarray, axis: int = -1) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along ``axis`` (length a power of 2)."""
    a = np.moveaxis(np.asarray(a), axis, -1)
    n = a.shape[-1]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    lead = a.shape[:-1]
    out = np.array(a, dtype=np.result_type(a.dtype, np.float64), order="C", copy=True)
    h = 1
    while h < n:
        v = out.reshape(lead + (n // (2 * h), 2, h))
        x = v[..., 0, :].copy()
        y = v[..., 1, :]
        v[..., 0, :] += y
        v[..., 1, :] = x - y
        h *= 2
    return np.moveaxis(out, -1, axis)


def _tensor_shape(group: GroupSpec) -> tuple[int, ...]:
    # C order: the last axis varies fastest, i.e. the first digit.
    return tuple(reversed(group.radices))


def _batched_transform(values: np.ndarray, group: GroupSpec) -> np.ndarray:
    """Averaged forward transform of every row of a (batch, |G|) array."""
    values = np.asarray(values, dtype=np.complex128)
    size = group.cardinality
    if group.is_f2:
        return fwht(values, axis=-1) / size
    if size == 1:
        return values.copy()
    batch = values.shape[:-1]
    t = values.reshape(batch + _tensor_shape(group))
    axes = tuple(range(len(batch), t.ndim))
    return np.fft.fftn(t, axes=axes).reshape(batch + (size,)) / size


def _batched_inverse(coeffs: np.ndarray, group: GroupSpec) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    size = group.cardinality
    if group.is_f2:
        return fwht(coeffs, axis=-1)
    if size == 1:
        return coeffs.copy()
    batch = coeffs.shape[:-1]
    t = coeffs.reshape(batch + _tensor_shape(group))
    axes = tuple(range(len(batch), t.ndim))
    return np.fft.ifftn(t, axes=axes).reshape(batch + (size,)) * size


@dataclass(frozen=True, eq=False)
class Spectrum:
    group: GroupSpec
    coefficients: np.ndarray

    def __getitem__(self, xi: int) -> complex:
        return complex(self.coefficients[xi])

    def l2_sq(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "coefficients": [[float(c.real), float(c.imag)] for c in self.coefficients],
        }


def transform(f: DenseFn) -> Spectrum:
    f.group.check_dense()
    coeffs = _batched_transform(f.values[None, :], f.group)[0]
    coeffs.setflags(write=False)
    return Spectrum(f.group, coeffs)


def inverse(spec: Spectrum) -> DenseFn:
    return DenseFn(spec.group, _batched_inverse(spec.coefficients[None, :], spec.group)[0])


def character(group: GroupSpec, xi: int) -> DenseFn:
    """The character x -> e(<xi, x>) as a dense function."""
    idx = np.arange(group.cardinality)
    dx = group.digits(idx)
    dxi = group.digits(xi)
    r = np.asarray(group.radices, dtype=float)
    phase = (dx * dxi / r).sum(axis=-1) if r.size else np.zeros(len(idx))
    return DenseFn(group, np.exp(2j * np.pi * phase), bounded=True)


def naive_transform(f: DenseFn) -> np.ndarray:
    """O(|G|^2) transform straight from the definition."""
    G = f.group
    idx = np.arange(G.cardinality)
    dx = G.digits(idx).astype(float)
    r = np.asarray(G.radices, dtype=float)
    out = np.empty(G.cardinality, dtype=np.complex128)
    for xi in range(G.cardinality):
        phase = (dx * (G.digits(xi) / r)).sum(axis=-1) if r.size else np.zeros(len(idx))
        out[xi] = np.mean(f.values * np.exp(-2j * np.pi * phase))
    return out


def large_coeffs(f: DenseFn, tau: float) -> list[tuple[int, complex]]:
    """Every xi with |fhat(xi)| >= tau, largest first (ties by index)."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    c = transform(f).coefficients
    mags = np.abs(c)
    hits = np.nonzero(mags >= tau)[0]
    order = sorted(hits.tolist(), key=lambda i: (-mags[i], i))
    bound = f.l2_sq() / tau ** 2
    assert len(order) <= bound + 1e-9, "Plancherel bound violated"
    return [(int(i), complex(c[i])) for i in order]


def circle_dist(a: float, b: float) -> float:
    t = (a - b) % 1.0
    return min(t, 1.0 - t)


def min_separation(thetas: Sequence[float]) -> float:
    th = sorted(float(t) % 1.0 for t in thetas)
    if len(th) < 2:
        return 1.0
    gaps = [th[i + 1] - th[i] for i in range(len(th) - 1)]
    gaps.append(1.0 - th[-1] + th[0])
    return min(gaps)


@dataclass(frozen=True)
class SieveResult:
    lhs: float
    rhs: float
    passed: bool

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs else math.inf

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.passed))


def large_sieve_check(f: Sequence[complex], thetas: Sequence[float],
                      delta: float | None = None) -> SieveResult:
    """Compare sum_j |sum_{y=1}^M f(y) e(y theta_j)|^2 with (M + 1/delta) sum |f|^2.

    ``f`` holds f(1), ..., f(M).  When ``delta`` is omitted the actual minimum
    separation of the points is used.
    """
    vals = np.asarray(f, dtype=np.complex128)
    M = len(vals)
    sep = min_separation(thetas)
    if delta is None:
        delta = sep
    if delta <= 0:
        raise ValueError("delta must be positive")
    if len(thetas) > 1 and sep < delta - 1e-15:
        raise ValueError(f"points are only {sep}-separated, not {delta}")
    y = np.arange(1, M + 1)
    th = np.asarray(thetas, dtype=float)
    sums = np.exp(2j * np.pi * np.outer(th, y)) @ vals
    lhs = float(np.sum(np.abs(sums) ** 2))
    rhs = float((M + 1.0 / delta) * np.sum(np.abs(vals) ** 2))
    return SieveResult(lhs, rhs, lhs <= rhs * (1 + 1e-12))
