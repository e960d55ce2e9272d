"""Gowers uniformity norms U^1..U^4.

Two independent evaluation routes are provided.  ``gowers_norm_naive`` sums the
conjugation-alternating product over every cube (x, h_1, ..., h_k) literally;
``gowers_norm_fast`` uses ||f||_{U^k}^{2^k} = E_h ||f_h||_{U^{k-1}}^{2^{k-1}}
down to U^2, which is evaluated as sum |fhat|^4.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .fourier import _batched_transform
from .groups import DenseFn, GroupMismatchError

NAIVE_LIMITS = {1: 1 << 16, 2: 1 << 12, 3: 1 << 10, 4: 1 << 8}
IMAG_TOL = 1e-9
CLAMP_TOL = 1e-9


def mult_derivative(f: DenseFn, h: int) -> DenseFn:
    """x -> f(x + h) conj(f(x))."""
    G = f.group
    if not 0 <= int(h) < G.cardinality:
        raise GroupMismatchError(f"shift {h} is not an element of {G!r}")
    idx = np.arange(G.cardinality)
    vals = f.values[G.add(idx, int(h))] * f.values.conj()
    return DenseFn(G, vals, f.bounded)


def _root(total: complex, k: int) -> float:
    if abs(total.imag) >= IMAG_TOL * max(1.0, abs(total.real)):
        raise ArithmeticError(f"Gowers average has imaginary part {total.imag}")
    re = total.real
    if re < 0:
        if re < -CLAMP_TOL:
            raise ArithmeticError(f"Gowers average is negative: {re}")
        re = 0.0
    return float(re ** (1.0 / 2 ** k))


# ---------------------------------------------------------------- naive sums
@numba.njit(cache=True)
def _naive_u1(f, add):
    n = f.shape[0]
    s = 0j
    for x in range(n):
        for h1 in range(n):
            s += f[x] * np.conj(f[add[x, h1]])
    return s / n ** 2


@numba.njit(cache=True)
def _naive_u2(f, add):
    n = f.shape[0]
    s = 0j
    for x in range(n):
        for h1 in range(n):
            x1 = add[x, h1]
            for h2 in range(n):
                x2 = add[x, h2]
                x12 = add[x1, h2]
                s += f[x] * np.conj(f[x1] * f[x2]) * f[x12]
    return s / n ** 3


@numba.njit(cache=True)
def _naive_u3(f, add):
    n = f.shape[0]
    s = 0j
    for x in range(n):
        for h1 in range(n):
            x1 = add[x, h1]
            p1 = f[x] * np.conj(f[x1])
            for h2 in range(n):
                x2 = add[x, h2]
                x12 = add[x1, h2]
                p2 = p1 * np.conj(f[x2]) * f[x12]
                for h3 in range(n):
                    x3 = add[x, h3]
                    x13 = add[x1, h3]
                    x23 = add[x2, h3]
                    x123 = add[x12, h3]
                    s += (p2 * np.conj(f[x3]) * f[x13] * f[x23]
                          * np.conj(f[x123]))
    return s / n ** 4


@numba.njit(cache=True)
def _naive_u4(f, add):
    n = f.shape[0]
    s = 0j
    for x in range(n):
        for h1 in range(n):
            x1 = add[x, h1]
            for h2 in range(n):
                x2 = add[x, h2]
                x12 = add[x1, h2]
                for h3 in range(n):
                    x3 = add[x, h3]
                    x13 = add[x1, h3]
                    x23 = add[x2, h3]
                    x123 = add[x12, h3]
                    p3 = (f[x] * np.conj(f[x1]) * np.conj(f[x2]) * f[x12]
                          * np.conj(f[x3]) * f[x13] * f[x23] * np.conj(f[x123]))
                    for h4 in range(n):
                        q = (np.conj(f[add[x, h4]]) * f[add[x1, h4]]
                             * f[add[x2, h4]] * np.conj(f[add[x12, h4]])
                             * f[add[x3, h4]] * np.conj(f[add[x13, h4]])
                             * np.conj(f[add[x23, h4]]) * f[add[x123, h4]])
                        s += p3 * q
    return s / n ** 5


_NAIVE = {1: _naive_u1, 2: _naive_u2, 3: _naive_u3, 4: _naive_u4}


def gowers_power_naive(f: DenseFn, k: int) -> complex:
    """The raw average whose 2^k-th root is the U^k norm."""
    if k not in _NAIVE:
        raise ValueError("k must be 1, 2, 3 or 4")
    if f.group.cardinality > NAIVE_LIMITS[k]:
        raise ValueError(f"naive U^{k} is limited to |G| <= {NAIVE_LIMITS[k]}")
    vals = np.ascontiguousarray(f.values)
    return complex(_NAIVE[k](vals, f.group.add_table))


def gowers_norm_naive(f: DenseFn, k: int) -> float:
    return _root(gowers_power_naive(f, k), k)


# ---------------------------------------------------------------- fast route
def _u2_power_rows(rows: np.ndarray, group) -> np.ndarray:
    coeffs = _batched_transform(rows, group)
    return np.sum(np.abs(coeffs) ** 4, axis=-1)


def _derivative_rows(vals: np.ndarray, group, shifts: np.ndarray) -> np.ndarray:
    idx = np.arange(group.cardinality)
    shifted = group.add(shifts[:, None], idx[None, :])
    return vals[shifted] * vals.conj()[None, :]


def _power_fast(vals: np.ndarray, group, k: int, chunk: int = 256) -> float:
    size = group.cardinality
    if k == 1:
        return abs(vals.mean()) ** 2
    if k == 2:
        return float(_u2_power_rows(vals[None, :], group)[0])
    total = 0.0
    for start in range(0, size, chunk):
        shifts = np.arange(start, min(size, start + chunk))
        rows = _derivative_rows(vals, group, shifts)
        if k == 3:
            total += float(_u2_power_rows(rows, group).sum())
        else:
            total += sum(_power_fast(r, group, k - 1) for r in rows)
    return total / size


def gowers_power_fast(f: DenseFn, k: int) -> float:
    if k not in (1, 2, 3, 4):
        raise ValueError("k must be 1, 2, 3 or 4")
    f.group.check_dense()
    return _power_fast(f.values, f.group, k)


def gowers_norm_fast(f: DenseFn, k: int) -> float:
    return _root(complex(gowers_power_fast(f, k)), k)


def gowers_norm(f: DenseFn, k: int, method: str = "fast") -> float:
    if method == "fast":
        return gowers_norm_fast(f, k)
    if method == "naive":
        return gowers_norm_naive(f, k)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class MonotonicityResult:
    u1: float
    u2: float
    u3: float
    passed: bool

    def __iter__(self):
        return iter((self.u1, self.u2, self.u3, self.passed))


def monotonicity_check(f: DenseFn, tol: float = 1e-9) -> MonotonicityResult:
    if f.sup_norm() > 1 + 1e-12:
        raise ValueError("monotonicity is only asserted for 1-bounded f")
    u1, u2, u3 = (gowers_norm_fast(f, k) for k in (1, 2, 3))
    return MonotonicityResult(u1, u2, u3, u1 <= u2 + tol and u2 <= u3 + tol)
