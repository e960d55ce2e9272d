"""Freiman homomorphisms of order 2 and 3, and dense models over F_2.

Witnesses are reported in a canonical form: for an additive quadruple
x1 + x2 = x3 + x4 the pair holding the smallest index is written as (x3, x4),
each pair ascending, and the scan runs lexicographically over (x3, x1, x2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import GroupSpec, PartialMap
from .sumsets import iterated

MAX_SUPPORT = 4096


@dataclass(frozen=True)
class FreimanCheck:
    ok: bool
    witness: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.ok


def _lookup(phi: PartialMap) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    keys, vals = phi.arrays()
    member = np.full(phi.domain.cardinality, -1, dtype=np.int64)
    member[keys] = np.arange(keys.size)
    return keys, vals, member


def is_freiman_hom(phi: PartialMap) -> FreimanCheck:
    """Check phi(x1)+phi(x2) = phi(x3)+phi(x4) on every additive quadruple of S."""
    if len(phi.table) > MAX_SUPPORT:
        raise ValueError(f"|S| > {MAX_SUPPORT}")
    G, H = phi.domain, phi.codomain
    keys, vals, member = _lookup(phi)
    n = keys.size
    for i3 in range(n):
        x3 = keys[i3]
        a = np.arange(i3, n)
        i1, i2 = np.meshgrid(a, a, indexing="ij")
        keep = i2 >= i1
        i1, i2 = i1[keep], i2[keep]
        x4 = G.sub(G.add(keys[i1], keys[i2]), x3)
        j4 = member[x4]
        ok = j4 >= i3
        if not ok.any():
            continue
        i1, i2, j4 = i1[ok], i2[ok], j4[ok]
        lhs = H.add(vals[i1], vals[i2])
        rhs = H.add(vals[i3], vals[j4])
        bad = np.nonzero(lhs != rhs)[0]
        if bad.size:
            b = bad[0]
            return FreimanCheck(False, (int(keys[i1[b]]), int(keys[i2[b]]),
                                        int(x3), int(keys[j4[b]])))
    return FreimanCheck(True)


def is_freiman_iso(phi: PartialMap) -> bool:
    images = list(phi.table.values())
    if len(set(images)) != len(images):
        return False
    return bool(is_freiman_hom(phi)) and bool(is_freiman_hom(phi.inverse()))


def is_freiman_quadratic(phi: PartialMap) -> FreimanCheck:
    """Check that the alternating sum over every 3-cube with vertices in S vanishes.

    The witness is (x, h1, h2, h3) for the first failing cube, scanning the
    vertices x, x+h1, x+h2, x+h3 lexicographically by index.
    """
    G, H = phi.domain, phi.codomain
    if G.kind != "vector":
        raise ValueError("Freiman quadratic check needs a vector-space domain")
    keys, vals, member = _lookup(phi)
    n = keys.size
    if n == 0:
        return FreimanCheck(True)
    i1, i2, i3 = (a.reshape(-1) for a in np.meshgrid(np.arange(n), np.arange(n),
                                                     np.arange(n), indexing="ij"))
    for i0 in range(n):
        x = keys[i0]
        h1 = G.sub(keys[i1], x)
        h2 = G.sub(keys[i2], x)
        h3 = G.sub(keys[i3], x)
        v12 = member[G.add(keys[i1], h2)]
        v13 = member[G.add(keys[i1], h3)]
        v23 = member[G.add(keys[i2], h3)]
        ok = (v12 >= 0) & (v13 >= 0) & (v23 >= 0)
        v123 = np.full_like(v12, -1)
        v123[ok] = member[G.add(keys[v12[ok]], h3[ok])]
        ok &= v123 >= 0
        if not ok.any():
            continue
        idx = np.nonzero(ok)[0]
        plus = H.add(H.add(vals[i0], vals[v12[idx]]),
                     H.add(vals[v13[idx]], vals[v23[idx]]))
        minus = H.add(H.add(vals[i1[idx]], vals[i2[idx]]),
                      H.add(vals[i3[idx]], vals[v123[idx]]))
        bad = np.nonzero(plus != minus)[0]
        if bad.size:
            b = idx[bad[0]]
            return FreimanCheck(False, (int(x), int(h1[b]), int(h2[b]), int(h3[b])))
    return FreimanCheck(True)


# ---------------------------------------------------------------- dense model
def _bits(v: int, n: int) -> np.ndarray:
    return (v >> np.arange(n)) & 1


def apply_f2(matrix: np.ndarray, xs: np.ndarray, in_dim: int) -> np.ndarray:
    """Apply an (m x in_dim) bit matrix to F_2 vectors given as indices."""
    m = matrix.shape[0]
    if m == 0:
        return np.zeros(len(xs), dtype=np.int64)
    bits = (np.asarray(xs, dtype=np.int64)[:, None] >> np.arange(in_dim)) & 1
    img = (bits @ matrix.T) & 1
    return (img << np.arange(m)).sum(axis=1)


def quotient_matrix(x: int, n: int) -> np.ndarray:
    """(n-1) x n bit matrix with kernel <x>: clear the lowest set bit of x, drop it."""
    if x == 0:
        raise ValueError("cannot quotient by zero")
    j = (x & -x).bit_length() - 1
    xb = _bits(x, n)
    Q = np.zeros((n - 1, n), dtype=np.int64)
    rows = [i for i in range(n) if i != j]
    for r, i in enumerate(rows):
        Q[r, i] = 1
        if xb[i]:
            Q[r, j] ^= 1
    return Q


@dataclass(frozen=True, eq=False)
class DenseModel:
    ambient_dim: int
    model_dim: int
    projection: np.ndarray
    model_set: tuple[int, ...]
    source: tuple[int, ...]
    steps: int = 0

    def project(self, xs) -> np.ndarray:
        return apply_f2(self.projection, np.asarray(xs), self.ambient_dim)

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "model_dim": self.model_dim,
            "projection": self.projection.tolist(),
            "model_set": list(self.model_set),
        }


def _iso_on(A: np.ndarray, images: np.ndarray, N: int, n: int) -> bool:
    phi = PartialMap(GroupSpec.vector(2, N), GroupSpec.vector(2, n),
                     dict(zip(A.tolist(), images.tolist())))
    return len(set(images.tolist())) == len(A) and is_freiman_iso(phi)


def dense_model_f2(A, N: int) -> DenseModel:
    """Project A in F_2^N along vectors outside 4 pi(A) until 4 pi(A) is everything."""
    if N > 24:
        raise ValueError("ambient dimension capped at 24")
    A = np.unique(np.asarray(list(A), dtype=np.int64))
    if A.size == 0:
        raise ValueError("A must be nonempty")
    n = N
    P = np.eye(N, dtype=np.int64)
    steps = 0
    while True:
        S = apply_f2(P, A, N)
        four = iterated(S, 4, GroupSpec.vector(2, n)) if n else np.array([0])
        if four.size == 1 << n:
            break
        missing = np.ones(1 << n, dtype=bool)
        missing[four] = False
        x = int(np.argmax(missing))
        newP = (quotient_matrix(x, n) @ P) & 1
        if not _iso_on(A, apply_f2(newP, A, N), N, n - 1):
            raise AssertionError("projection broke the Freiman isomorphism")
        P, n, steps = newP, n - 1, steps + 1

    S = apply_f2(P, A, N)
    if not _iso_on(A, S, N, n):
        raise AssertionError("final projection is not a Freiman isomorphism")
    four = iterated(S, 4, GroupSpec.vector(2, n)) if n else np.array([0])
    if four.size != 1 << n:
        raise AssertionError("4 pi(A) is not the whole model space")
    return DenseModel(N, n, P.reshape(n, N), tuple(sorted(set(S.tolist()))),
                      tuple(A.tolist()), steps)
