"""Quadratic polynomials over F_2 and F_p.

Vectors in F_p^n are encoded as group indices (first coordinate least
significant), matching ``GroupSpec.vector``.  On a product F_2^{n+N} the
x-block is the low n bits, so the index of (x, y) is x + 2^n y.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .fourier import fwht
from .groups import DenseFn, GroupSpec

GAUSS_CAP = 5 ** 7
CORRELATE_MAX_DIM = 4
PROJECTIVE_CAP = 5 ** 6


def bit_matrix(n: int) -> np.ndarray:
    """Row x holds the bits of x (2^n x n)."""
    return ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(np.int64)


# ---------------------------------------------------------------- F_2
@dataclass(frozen=True, eq=False)
class QuadPolyF2:
    """psi(x) = sum_{i<j} U_ij x_i x_j + b.x + c over F_2, U strictly upper triangular."""
    n: int
    U: np.ndarray
    b: np.ndarray
    c: int = 0

    def __post_init__(self):
        U = np.asarray(self.U, dtype=np.int64).reshape(self.n, self.n) & 1
        if np.any(np.tril(U)):
            raise ValueError("U must be strictly upper triangular; use from_matrix")
        b = np.asarray(self.b, dtype=np.int64).reshape(self.n) & 1
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", int(self.c) & 1)

    @classmethod
    def from_matrix(cls, M, b=None, c: int = 0) -> "QuadPolyF2":
        """Normalise x.Mx + b.x + c for an arbitrary bit matrix M."""
        M = np.asarray(M, dtype=np.int64) & 1
        n = M.shape[0]
        b = np.zeros(n, dtype=np.int64) if b is None else np.asarray(b, dtype=np.int64) & 1
        U = np.triu(M ^ M.T, 1)
        return cls(n, U, b ^ np.diag(M), c)

    @classmethod
    def zero(cls, n: int) -> "QuadPolyF2":
        return cls(n, np.zeros((n, n)), np.zeros(n), 0)

    def values(self) -> np.ndarray:
        X = bit_matrix(self.n)
        quad = ((X @ self.U) * X).sum(axis=1)
        return (quad + X @ self.b + self.c) & 1

    def __call__(self, x: int) -> int:
        bits = (int(x) >> np.arange(self.n)) & 1
        return int((bits @ self.U @ bits + bits @ self.b + self.c) & 1)

    def phase(self) -> DenseFn:
        return DenseFn(GroupSpec.vector(2, self.n), 1.0 - 2.0 * self.values(), bounded=True)

    def coefficients(self) -> tuple[int, ...]:
        iu = np.triu_indices(self.n, 1)
        return tuple(self.U[iu].tolist()) + tuple(self.b.tolist()) + (self.c,)

    def to_json(self) -> dict:
        return {"n": self.n, "U": self.U.tolist(), "b": self.b.tolist(), "c": self.c}

    @classmethod
    def from_json(cls, obj: dict) -> "QuadPolyF2":
        n = int(obj["n"])
        M = np.asarray(obj.get("U", obj.get("M", np.zeros((n, n)))), dtype=np.int64).reshape(n, n)
        return cls.from_matrix(M, obj.get("b", [0] * n), obj.get("c", 0))


def third_derivative_vanishes(psi: QuadPolyF2, hs: Iterable[tuple[int, int, int]]) -> bool:
    vals = psi.values()
    x = np.arange(1 << psi.n)
    for h1, h2, h3 in hs:
        tot = np.zeros_like(x)
        for w in itertools.product((0, 1), repeat=3):
            shift = (h1 if w[0] else 0) ^ (h2 if w[1] else 0) ^ (h3 if w[2] else 0)
            tot ^= vals[x ^ shift]
        if tot.any():
            return False
    return True


@dataclass(frozen=True, eq=False)
class MixedSplit:
    psi: np.ndarray               # N x n bit matrix, psi(x) = psi @ x
    restriction_y: QuadPolyF2     # y -> Psi(0, y)
    restriction_x: QuadPolyF2     # x -> Psi(x, 0)

    def apply(self, x) -> np.ndarray:
        """psi(x) as an index in F_2^N, vectorised over x."""
        n = self.psi.shape[1]
        N = self.psi.shape[0]
        bits = (np.asarray(x, dtype=np.int64)[..., None] >> np.arange(n)) & 1
        img = (bits @ self.psi.T) & 1
        return (img << np.arange(N)).sum(axis=-1)


def mixed_derivative_split(Psi: QuadPolyF2, n: int) -> MixedSplit:
    """Psi(x,y) = Psi(x,0) + Psi(0,y) + Psi(0,0) + psi(x).y over F_2."""
    total = Psi.n
    N = total - n
    if not 0 <= n <= total:
        raise ValueError("bad block split")
    U, b = Psi.U, Psi.b
    psi = U[:n, n:].T.copy()
    rx = QuadPolyF2(n, U[:n, :n], b[:n], Psi.c)
    ry = QuadPolyF2(N, U[n:, n:], b[n:], Psi.c)
    split = MixedSplit(psi, ry, rx)
    if total <= 12:
        vals = Psi.values()
        idx = np.arange(1 << total)
        x, y = idx & ((1 << n) - 1), idx >> n
        ybits = (y[:, None] >> np.arange(N)) & 1
        pxy = ((((x[:, None] >> np.arange(n)) & 1) @ psi.T & 1) * ybits).sum(axis=1) & 1
        rhs = rx.values()[x] ^ ry.values()[y] ^ Psi.c ^ pxy
        assert np.array_equal(vals, rhs), "mixed derivative identity failed"
    return split


def symmetric_split_f2(B) -> np.ndarray:
    """M with M + M^T = B for a symmetric zero-diagonal bit matrix B."""
    B = np.asarray(B, dtype=np.int64) & 1
    if not np.array_equal(B, B.T):
        raise ValueError("B is not symmetric")
    if np.any(np.diag(B)):
        raise ValueError("B has a nonzero diagonal")
    M = np.triu(B, 1)
    assert np.array_equal(M ^ M.T, B)
    return M


@dataclass(frozen=True, eq=False)
class CorrelateResult:
    psi: QuadPolyF2
    correlation: float
    phases_enumerated: int


def best_quadratic_correlate(f: DenseFn, tol: float = 1e-12) -> CorrelateResult:
    """Exhaustive max of |E f(x) (-1)^{psi(x)}| over all quadratics on F_2^n.

    Every upper-triangular M (diagonal included), linear part b and constant c
    is scanned; for each M the b-sweep is one Walsh-Hadamard transform and c
    only flips the sign.  Ties go to the lexicographically smallest
    coefficient tuple (upper entries of M row-major, then b, then c).
    """
    G = f.group
    if not G.is_f2:
        raise ValueError("best_quadratic_correlate needs F_2^n")
    n = G.n
    if n > CORRELATE_MAX_DIM:
        raise ValueError(f"exhaustive search limited to n <= {CORRELATE_MAX_DIM}")
    X = bit_matrix(n)
    iu = np.triu_indices(n)
    nq = len(iu[0])
    # b tuples in lexicographic order (first coordinate most significant)
    b_tuples = list(itertools.product((0, 1), repeat=n))
    b_index = np.array([sum(bit << i for i, bit in enumerate(t)) for t in b_tuples], dtype=np.int64)
    best = (-1.0, None)
    for mbits in itertools.product((0, 1), repeat=nq):
        M = np.zeros((n, n), dtype=np.int64)
        M[iu] = mbits
        quad = ((X @ M) * X).sum(axis=1) & 1
        g = f.values * (1.0 - 2.0 * quad)
        corr = np.abs(fwht(g)) / (1 << n)
        vals = corr[b_index]
        k = int(np.argmax(vals >= vals.max() - tol))
        if vals[k] > best[0] + tol:
            best = (float(vals[k]), (M, b_tuples[k]))
    M, bt = best[1]
    psi = QuadPolyF2.from_matrix(M, list(bt), 0)
    return CorrelateResult(psi, best[0], 1 << (nq + n + 1))


# ---------------------------------------------------------------- F_p linear algebra
def _inv(a: int, p: int) -> int:
    return pow(int(a), -1, p)


def rref_mod_p(A, p: int) -> tuple[np.ndarray, list[int]]:
    R = np.asarray(A, dtype=np.int64).copy() % p
    if R.ndim != 2:
        raise ValueError("matrix expected")
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        R[[r, k]] = R[[k, r]]
        R[r] = (R[r] * _inv(R[r, c], p)) % p
        for i in range(rows):
            if i != r and R[i, c]:
                R[i] = (R[i] - R[i, c] * R[r]) % p
        pivots.append(c)
        r += 1
    return R[:r], pivots


def rank_mod_p(A, p: int) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref_mod_p(A, p)[1])


def colspace_mod_p(A, p: int) -> np.ndarray:
    """Canonical (RREF) basis of the column space, one basis vector per row."""
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return np.zeros((0, A.shape[0] if A.ndim == 2 else 0), dtype=np.int64)
    return rref_mod_p(A.T, p)[0]


def span_basis(rows, p: int, dim: int) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, dim)
    if rows.shape[0] == 0:
        return rows
    return rref_mod_p(rows, p)[0]


def kernel_mod_p(A, p: int) -> np.ndarray:
    """Basis (rows) of {v : A v = 0}."""
    A = np.asarray(A, dtype=np.int64) % p
    cols = A.shape[1]
    R, piv = rref_mod_p(A, p) if A.shape[0] else (np.zeros((0, cols), dtype=np.int64), [])
    free = [c for c in range(cols) if c not in piv]
    out = []
    for fcol in free:
        v = np.zeros(cols, dtype=np.int64)
        v[fcol] = 1
        for r, pc in enumerate(piv):
            v[pc] = (-R[r, fcol]) % p
        out.append(v)
    return np.array(out, dtype=np.int64).reshape(len(out), cols)


def digits_p(idx, p: int, n: int) -> np.ndarray:
    return (np.asarray(idx, dtype=np.int64)[..., None] // p ** np.arange(n)) % p


def index_p(vecs, p: int) -> np.ndarray:
    vecs = np.asarray(vecs, dtype=np.int64)
    return (vecs * p ** np.arange(vecs.shape[-1])).sum(axis=-1)


def span_elements(basis, p: int, dim: int) -> np.ndarray:
    """Indices of every vector in the span of ``basis``."""
    basis = np.asarray(basis, dtype=np.int64).reshape(-1, dim)
    k = basis.shape[0]
    coeffs = digits_p(np.arange(p ** k), p, k)
    return index_p((coeffs @ basis) % p, p)


# ---------------------------------------------------------------- F_p quadratic forms
@dataclass(frozen=True, eq=False)
class QuadFormFp:
    """Q(y) = y^T A y + l.y + c over F_p with A symmetric."""
    p: int
    A: np.ndarray
    linear: np.ndarray = None
    const: int = 0

    def __post_init__(self):
        A = np.asarray(self.A, dtype=np.int64) % self.p
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("A must be square")
        if not np.array_equal(A, A.T):
            raise ValueError("A must be symmetric")
        N = A.shape[0]
        lin = np.zeros(N, dtype=np.int64) if self.linear is None else np.asarray(self.linear, dtype=np.int64) % self.p
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "const", int(self.const) % self.p)

    @property
    def N(self) -> int:
        return self.A.shape[0]

    @classmethod
    def from_monomials(cls, p: int, coeffs, linear=None, const: int = 0) -> "QuadFormFp":
        """From upper-triangular monomial coefficients: coeffs[i][j] multiplies y_i y_j."""
        C = np.triu(np.asarray(coeffs, dtype=np.int64) % p)
        half = (p + 1) // 2
        off = (C - np.diag(np.diag(C))) * half % p
        return cls(p, (off + off.T + np.diag(np.diag(C))) % p, linear, const)

    def values(self) -> np.ndarray:
        Y = digits_p(np.arange(self.p ** self.N), self.p, self.N)
        return (((Y @ self.A) * Y).sum(axis=1) + Y @ self.linear + self.const) % self.p

    def homogeneous(self) -> "QuadFormFp":
        return QuadFormFp(self.p, self.A)

    def __add__(self, other: "QuadFormFp") -> "QuadFormFp":
        return QuadFormFp(self.p, self.A + other.A, self.linear + other.linear, self.const + other.const)

    def __sub__(self, other: "QuadFormFp") -> "QuadFormFp":
        return QuadFormFp(self.p, self.A - other.A, self.linear - other.linear, self.const - other.const)

    def scale(self, k: int) -> "QuadFormFp":
        return QuadFormFp(self.p, self.A * k, self.linear * k, self.const * k)

    def same_coefficients(self, other: "QuadFormFp") -> bool:
        return (np.array_equal(self.A, other.A) and np.array_equal(self.linear, other.linear)
                and self.const == other.const)

    def to_json(self) -> dict:
        return {"p": self.p, "A": self.A.tolist(), "linear": self.linear.tolist(), "const": self.const}

    @classmethod
    def from_json(cls, obj: dict) -> "QuadFormFp":
        return cls(int(obj["p"]), obj["A"], obj.get("linear"), obj.get("const", 0))


def rank_and_vq(Q: QuadFormFp, rng: np.random.Generator | None = None,
                checks: int = 32) -> tuple[int, np.ndarray]:
    """Rank of the homogeneous part and a basis of its column space V_Q."""
    if Q.p == 2:
        raise ValueError("rank_and_vq needs odd p")
    basis = colspace_mod_p(Q.A, Q.p)
    rank = basis.shape[0]
    # Q(y + w) - Q(y) is the same for all y when w lies in the radical
    rad = kernel_mod_p(Q.A, Q.p)
    if rad.shape[0]:
        rng = rng or np.random.default_rng(0)
        H = Q.homogeneous()
        for _ in range(checks):
            y = rng.integers(0, Q.p, Q.N)
            w = (rng.integers(0, Q.p, rad.shape[0]) @ rad) % Q.p
            assert (y @ H.A @ y - (y + w) @ H.A @ (y + w)) % Q.p == 0
    return rank, basis


@dataclass(frozen=True)
class GaussResult:
    magnitude: float
    rank: int
    expected: float
    dichotomy_ok: bool


def gauss_sum(Q: QuadFormFp, shift=None) -> GaussResult:
    """|E_y e_p(Q(y) + shift.y)| by direct summation, with the 0 / p^{-rank/2} check."""
    p, N = Q.p, Q.N
    if p ** N > GAUSS_CAP:
        raise ValueError(f"p^N above cap {GAUSS_CAP}")
    lin = np.zeros(N, dtype=np.int64) if shift is None else np.asarray(shift, dtype=np.int64)
    vals = (QuadFormFp(p, Q.A, Q.linear + lin, Q.const).values()) % p
    mag = float(abs(np.mean(np.exp(2j * np.pi * vals / p))))
    rank = rank_mod_p(Q.A, p)
    expected = p ** (-rank / 2)
    ok = abs(mag) <= 1e-9 or abs(mag - expected) <= 1e-9
    return GaussResult(mag, rank, expected, ok)


def gauss_inner(Qx: QuadFormFp, Qx2: QuadFormFp, shift=None) -> GaussResult:
    if Qx.p != Qx2.p or Qx.N != Qx2.N:
        raise ValueError("forms must share p and N")
    return gauss_sum(Qx - Qx2, shift)


# ---------------------------------------------------------------- families and recovery
@dataclass(frozen=True, eq=False)
class LinearFormFamily:
    """x -> Q_x = sum_i x_i Q_{e_i}, homogeneous forms on F_p^N indexed by F_p^n."""
    p: int
    n: int
    N: int
    basis_forms: tuple[QuadFormFp, ...]
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(self.basis_forms) != self.n:
            raise ValueError("one form per basis vector")
        for Q in self.basis_forms:
            if Q.p != self.p or Q.N != self.N:
                raise ValueError("forms must share p and N")

    def matrix(self, x: int) -> np.ndarray:
        xs = digits_p(x, self.p, self.n)
        A = np.zeros((self.N, self.N), dtype=np.int64)
        for c, Q in zip(xs.tolist(), self.basis_forms):
            A += c * Q.A
        return A % self.p

    def form(self, x: int) -> QuadFormFp:
        return QuadFormFp(self.p, self.matrix(x))

    def subspace(self, x: int) -> np.ndarray:
        """RREF basis of V_x."""
        x = int(x)
        if x not in self._cache:
            self._cache[x] = colspace_mod_p(self.matrix(x), self.p)
        return self._cache[x]

    def rank(self, x: int) -> int:
        return self.subspace(x).shape[0]

    def is_linear(self, pairs: Iterable[tuple[int, int]]) -> bool:
        G = GroupSpec.vector(self.p, self.n)
        for x, y in pairs:
            lhs = self.form(int(G.add(x, y)))
            if not lhs.same_coefficients(self.form(x) + self.form(y)):
                return False
        return True

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "N": self.N,
                "forms": [Q.A.tolist() for Q in self.basis_forms]}

    @classmethod
    def from_json(cls, obj: dict) -> "LinearFormFamily":
        p = int(obj["p"])
        forms = tuple(QuadFormFp(p, A) for A in obj["forms"])
        return cls(p, int(obj["n"]), int(obj["N"]), forms)


def projective_points(p: int, N: int) -> np.ndarray:
    """Indices of the nonzero vectors whose first nonzero coordinate is 1."""
    idx = np.arange(1, p ** N)
    d = digits_p(idx, p, N)
    first = d[np.arange(len(idx)), np.argmax(d != 0, axis=1)]
    return idx[first == 1]


def normalise_projective(idx: np.ndarray, p: int, N: int) -> np.ndarray:
    d = digits_p(idx, p, N)
    first = d[np.arange(len(idx)), np.argmax(d != 0, axis=1)]
    inv = np.array([0] + [pow(int(a), -1, p) for a in range(1, p)], dtype=np.int64)
    return index_p((d * inv[first][:, None]) % p, p)


@dataclass
class RankLineReport:
    V: np.ndarray
    kept: list[int]
    fraction: float
    case: str
    steps: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"V": self.V.tolist(), "dim": int(self.V.shape[0]), "kept": self.kept,
                "fraction": self.fraction, "case": self.case, "chosen_vectors": self.steps}


def rank_line_recover(family: LinearFormFamily, A: Sequence[int], r: int,
                      min_fraction: float = 1.0) -> RankLineReport:
    """A subspace V with dim V <= r containing V_x for a sub-collection of A.

    Case 1: if the x in A with Q_x = 0 already make up ``min_fraction`` of A,
    return V = 0 on them.  Otherwise grow V one vector at a time, each time
    choosing the vector lying in the most spaces V_x + V (x still usable), and
    drop the x with dim(V_x + V) > r.  Stops once V_x is inside V for every
    remaining x.
    """
    p, N = family.p, family.N
    A = sorted({int(a) for a in A})
    if not A:
        raise ValueError("A must be nonempty")
    if p ** N > PROJECTIVE_CAP:
        raise ValueError(f"p^N above exhaustive cap {PROJECTIVE_CAP}")
    for x in A:
        if family.rank(x) > r:
            raise ValueError(f"rank of Q_{x} exceeds r = {r}")

    zero = [x for x in A if family.rank(x) == 0]
    if len(zero) >= min_fraction * len(A):
        V = np.zeros((0, N), dtype=np.int64)
        return _checked(family, V, zero, A, r, "kernel")

    V = np.zeros((0, N), dtype=np.int64)
    kept = list(A)
    steps: list[int] = []
    in_V = set(span_elements(V, p, N).tolist())
    while True:
        pending = [x for x in kept
                   if not set(span_elements(family.subspace(x), p, N).tolist()) <= in_V]
        if not pending:
            break
        counts: dict[int, int] = {}
        for x in kept:
            S = span_basis(np.vstack([V, family.subspace(x)]), p, N)
            els = span_elements(S, p, N)
            els = els[~np.isin(els, list(in_V))]
            if els.size == 0:
                continue
            for v in np.unique(normalise_projective(els, p, N)).tolist():
                counts[v] = counts.get(v, 0) + 1
        if not counts:
            raise RuntimeError("incidence search found no vector outside V")
        best = min(counts, key=lambda v: (-counts[v], v))
        steps.append(best)
        V = span_basis(np.vstack([V, digits_p(best, p, N)[None, :]]), p, N)
        in_V = set(span_elements(V, p, N).tolist())
        kept = [x for x in kept
                if span_basis(np.vstack([V, family.subspace(x)]), p, N).shape[0] <= r]
    rep = _checked(family, V, kept, A, r, "incidence")
    rep.steps = steps
    return rep


def _checked(family, V, kept, A, r, case) -> RankLineReport:
    p, N = family.p, family.N
    if V.shape[0] > r:
        raise AssertionError("recovered subspace too large")
    for x in kept:
        if span_basis(np.vstack([V, family.subspace(x)]), p, N).shape[0] != V.shape[0]:
            raise AssertionError(f"V_{x} not contained in V")
    if not kept:
        raise AssertionError("empty sub-collection")
    return RankLineReport(V, kept, len(kept) / len(A), case)


@dataclass(frozen=True)
class QuadrupleStats:
    quadruples: int
    good: int
    bad: int
    lower_bound: int


def additive_quadruple_stats(A: Sequence[int], family: LinearFormFamily) -> QuadrupleStats:
    """Count (x1, x2, x3, x4) in A^4 with x1 + x2 = x3 + x4 and classify them.

    A quadruple is good when no V_{x_i} meets the sum of two others nontrivially.
    """
    p, n, N = family.p, family.n, family.N
    G = GroupSpec.vector(p, n)
    A = np.array(sorted({int(a) for a in A}), dtype=np.int64)
    if A.size == 0:
        return QuadrupleStats(0, 0, 0, 0)
    member = np.zeros(G.cardinality, dtype=bool)
    member[A] = True

    ids: dict[bytes, int] = {}
    bases: list[np.ndarray] = []
    sid = np.full(G.cardinality, -1, dtype=np.int64)
    for x in A.tolist():
        B = family.subspace(x)
        key = B.tobytes() + bytes([B.shape[0]])
        if key not in ids:
            ids[key] = len(bases)
            bases.append(B)
        sid[x] = ids[key]

    memo: dict[tuple[int, ...], bool] = {}

    def dim(*parts) -> int:
        return span_basis(np.vstack([bases[i] for i in parts] + [np.zeros((0, N), dtype=np.int64)]),
                          p, N).shape[0]

    def good(key: tuple[int, ...]) -> bool:
        if key not in memo:
            ok = True
            for i, j, k in itertools.permutations(range(4), 3):
                a, b, c = key[i], key[j], key[k]
                if bases[a].shape[0] + dim(b, c) != dim(a, b, c):
                    ok = False
                    break
            memo[key] = ok
        return memo[key]

    total = good_count = 0
    x1, x2 = np.meshgrid(A, A, indexing="ij")
    x1, x2 = x1.ravel(), x2.ravel()
    s12 = G.add(x1, x2)
    for x3 in A.tolist():
        x4 = G.sub(s12, x3)
        hit = member[x4]
        if not hit.any():
            continue
        total += int(hit.sum())
        keys = np.stack([sid[x1[hit]], sid[x2[hit]], np.full(hit.sum(), sid[x3]), sid[x4[hit]]], axis=1)
        keys.sort(axis=1)
        uniq, counts = np.unique(keys, axis=0, return_counts=True)
        for k, c in zip(map(tuple, uniq.tolist()), counts.tolist()):
            if good(k):
                good_count += c
    bound = -(-len(A) ** 4 // G.cardinality)
    assert total >= bound, "additive quadruple count below the Cauchy-Schwarz bound"
    return QuadrupleStats(total, good_count, total - good_count, bound)
