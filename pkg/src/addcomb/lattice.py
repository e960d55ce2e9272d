"""Small-dimensional lattice tools with exact arithmetic.

Lattices are given by integer row vectors.  Norms are weighted sup norms
``max_j |u_j| * w_j`` with rational weights, which is what Bohr-set geometry
needs.  Reduction is exact (Fractions); enumeration runs in floating point on a
reduced basis and every candidate is re-checked exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ENUM_LIMIT = 2_000_000


class EnumerationLimit(RuntimeError):
    pass


def hnf_rows(rows: Sequence[Sequence[int]], carry: Sequence[int] | None = None,
             carry_mod: int | None = None) -> tuple[list[list[int]], list[int]]:
    """Row-style Hermite normal form: a basis for the row lattice.

    ``carry`` is an extra column transformed by the same unimodular row
    operations (reduced mod ``carry_mod`` if given); it is used to track the
    group element a lattice vector came from.
    """
    A = [list(map(int, r)) for r in rows]
    c = list(carry) if carry is not None else [0] * len(A)
    m = len(A[0]) if A else 0

    def red(v):
        return v % carry_mod if carry_mod else v

    basis, tags = [], []
    active = list(range(len(A)))
    for col in range(m):
        live = [i for i in active if A[i][col] != 0]
        while len(live) > 1:
            live.sort(key=lambda i: abs(A[i][col]))
            p = live[0]
            for i in live[1:]:
                q = A[i][col] // A[p][col]
                A[i] = [a - q * b for a, b in zip(A[i], A[p])]
                c[i] = red(c[i] - q * c[p])
            live = [i for i in live if A[i][col] != 0]
        if not live:
            continue
        p = live[0]
        if A[p][col] < 0:
            A[p] = [-a for a in A[p]]
            c[p] = red(-c[p])
        basis.append(A[p])
        tags.append(c[p])
        active.remove(p)
    # reduce entries above the pivots
    for k in range(len(basis)):
        col = next(j for j, v in enumerate(basis[k]) if v)
        for i in range(k):
            q = basis[i][col] // basis[k][col]
            if q:
                basis[i] = [a - q * b for a, b in zip(basis[i], basis[k])]
                tags[i] = red(tags[i] - q * tags[k])
    return basis, tags


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def lll(basis: list[list[int]], weights: Sequence[Fraction], tags: list[int] | None = None,
        tag_mod: int | None = None, delta: Fraction = Fraction(3, 4)):
    """Exact LLL on integer rows under the inner product sum_j w_j^2 u_j v_j."""
    B = [list(b) for b in basis]
    T = list(tags) if tags is not None else [0] * len(B)
    w2 = [Fraction(w) ** 2 for w in weights]
    n = len(B)

    def ip(u, v):
        return sum(wj * a * b for wj, a, b in zip(w2, u, v))

    def gso():
        bstar, mu = [], [[Fraction(0)] * n for _ in range(n)]
        norms = []
        for i in range(n):
            v = [Fraction(x) for x in B[i]]
            for j in range(i):
                mu[i][j] = ip(B[i], bstar[j]) / norms[j]
                v = [a - mu[i][j] * b for a, b in zip(v, bstar[j])]
            bstar.append(v)
            norms.append(ip(v, v))
        return mu, norms

    mu, norms = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                B[k] = [a - q * b for a, b in zip(B[k], B[j])]
                T[k] = T[k] - q * T[j]
                if tag_mod:
                    T[k] %= tag_mod
                mu, norms = gso()
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            B[k], B[k - 1] = B[k - 1], B[k]
            T[k], T[k - 1] = T[k - 1], T[k]
            mu, norms = gso()
            k = max(k - 1, 1)
    return B, T


def sup_norm(u: Sequence[int], weights: Sequence[Fraction]) -> Fraction:
    return max((abs(a) * Fraction(w) for a, w in zip(u, weights)), default=Fraction(0))


def rank_q(rows: Sequence[Sequence[int]]) -> int:
    M = [[Fraction(x) for x in r] for r in rows]
    rank, cols = 0, len(M[0]) if M else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][c] != 0:
                f = M[i][c] / M[rank][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def enumerate_ball(basis: list[list[int]], weights: Sequence[Fraction], radius: Fraction,
                   limit: int = ENUM_LIMIT) -> list[tuple[int, ...]]:
    """Coefficient vectors c != 0 with weighted sup norm of c.B at most ``radius``.

    Fincke-Pohst over the Euclidean ball of radius sqrt(dim) * radius, which
    contains the sup-norm ball, followed by an exact filter.
    """
    n = len(basis)
    dim = len(basis[0])
    fw = [float(w) for w in weights]
    rows = [[a * w for a, w in zip(b, fw)] for b in basis]
    # float Gram-Schmidt of the (reduced) basis
    bstar, mu, norms = [], [[0.0] * n for _ in range(n)], []
    for i in range(n):
        v = list(rows[i])
        for j in range(i):
            mu[i][j] = _dot(rows[i], bstar[j]) / norms[j]
            v = [a - mu[i][j] * b for a, b in zip(v, bstar[j])]
        bstar.append(v)
        norms.append(_dot(v, v))
    R2 = float(radius) ** 2 * dim * (1 + 1e-9) + 1e-300
    out: list[tuple[int, ...]] = []
    c = [0] * n
    count = 0

    def rec(i: int, rest: float):
        nonlocal count
        if i < 0:
            count += 1
            if count > limit:
                raise EnumerationLimit(f"more than {limit} lattice points in the search ball")
            if any(c):
                out.append(tuple(c))
            return
        centre = -sum(c[j] * mu[j][i] for j in range(i + 1, n))
        span = math.sqrt(max(rest, 0.0) / norms[i])
        lo, hi = math.ceil(centre - span - 1e-9), math.floor(centre + span + 1e-9)
        for ci in range(lo, hi + 1):
            c[i] = ci
            used = (ci - centre) ** 2 * norms[i]
            if used <= rest * (1 + 1e-9) + 1e-300:
                rec(i - 1, rest - used)
        c[i] = 0

    rec(n - 1, R2)
    keep = []
    for coeffs in out:
        u = [sum(ci * b[j] for ci, b in zip(coeffs, basis)) for j in range(dim)]
        if sup_norm(u, weights) <= radius:
            keep.append(coeffs)
    return keep


@dataclass(frozen=True)
class MinimaResult:
    vectors: list[list[int]]
    tags: list[int]
    minima: list[Fraction]


def successive_minima(basis: list[list[int]], weights: Sequence[Fraction],
                      tags: list[int] | None = None, tag_mod: int | None = None) -> MinimaResult:
    """Exact successive minima of a full-rank integer lattice under a weighted sup norm."""
    B, T = lll(basis, weights, tags, tag_mod)
    n = len(B)
    chosen: list[list[int]] = []
    chosen_tags: list[int] = []
    minima: list[Fraction] = []
    for _ in range(n):
        # a reduced basis vector independent of the chosen ones bounds the next minimum
        bound = min(sup_norm(b, weights) for b in B if rank_q(chosen + [b]) > len(chosen))
        cands = []
        for coeffs in enumerate_ball(B, weights, bound):
            u = [sum(ci * b[j] for ci, b in zip(coeffs, B)) for j in range(len(B[0]))]
            if rank_q(chosen + [u]) > len(chosen):
                first = next(x for x in u if x)
                if first < 0:
                    u = [-x for x in u]
                    coeffs = tuple(-x for x in coeffs)
                cands.append((sup_norm(u, weights), tuple(u), coeffs))
        norm, u, coeffs = min(cands)
        tag = sum(ci * t for ci, t in zip(coeffs, T))
        if tag_mod:
            tag %= tag_mod
        chosen.append(list(u))
        chosen_tags.append(tag)
        minima.append(norm)
    return MinimaResult(chosen, chosen_tags, minima)
