"""Lifting partial maps to functions with large U^3 norm, and recovering affine maps.

For phi : S -> F_2^N with S inside F_2^n the lift lives on F_2^{n+N} with
index x + 2^n y.  For phi : S -> Z/MZ with S inside {1..N} the lift lives on
Z/4NMZ with index x + 4N y.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .fourier import transform
from .freiman import is_freiman_hom
from .gowers import gowers_norm_fast
from .groups import DenseFn, GroupSpec, Params, PartialMap
from .quadratic import QuadPolyF2, best_quadratic_correlate, mixed_derivative_split

NORM_TOL = 1e-9
F2_VERIFY_DIM = 12
Z_VERIFY_SIZE = 1 << 14


class NotFreimanError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LiftedInstance:
    source: PartialMap
    lifted: DenseFn
    support: DenseFn
    sigma: float
    meta: dict = field(default_factory=dict)
    norm: float | None = None
    support_norm: float | None = None

    def to_json(self) -> dict:
        return {"sigma": self.sigma, "meta": self.meta, "u3": self.norm,
                "u3_support": self.support_norm, "lifted": self.lifted.to_json()}


def _dot_bits(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    v = np.bitwise_and(a, b)
    out = np.zeros_like(v)
    while v.any():
        out ^= v & 1
        v >>= 1
    return out


def lift_f2(phi: PartialMap, verify: bool = False) -> LiftedInstance:
    """f(x, y) = 1_S(x) (-1)^{phi(x).y} on F_2^{n+N}."""
    G, H = phi.domain, phi.codomain
    if not (G.is_f2 and H.is_f2):
        raise ValueError("lift_f2 needs F_2^n -> F_2^N")
    n, N = G.n, H.n
    big = GroupSpec.vector(2, n + N)
    big.check_dense()
    keys, vals = phi.arrays()
    img = np.zeros(G.cardinality, dtype=np.int64)
    img[keys] = vals
    inS = np.zeros(G.cardinality, dtype=bool)
    inS[keys] = True
    idx = np.arange(big.cardinality)
    x, y = idx & ((1 << n) - 1), idx >> n
    ind = inS[x].astype(float)
    f = DenseFn(big, ind * (1.0 - 2.0 * _dot_bits(img[x], y)), bounded=True)
    one = DenseFn(big, ind, bounded=True)
    sigma = len(keys) / G.cardinality
    inst = LiftedInstance(phi, f, one, sigma, {"ambient": "f2", "n": n, "N": N})
    return _verify(inst, sigma) if verify else inst


def lift_z(phi: PartialMap, N: int, verify: bool = False) -> LiftedInstance:
    """f(x + 4Ny) = 1_S(x) e(phi(x) y / M) on Z/4NMZ, S inside {1..N}."""
    H = phi.codomain
    if H.kind != "cyclic":
        raise ValueError("lift_z needs a cyclic codomain Z/MZ")
    M = H.N
    keys, vals = phi.arrays()
    if keys.size and (keys.min() < 1 or keys.max() > N):
        raise ValueError("S must lie in {1..N}")
    big = GroupSpec.cyclic(4 * N * M)
    big.check_dense()
    img = np.zeros(4 * N, dtype=np.int64)
    img[keys] = vals
    inS = np.zeros(4 * N, dtype=bool)
    inS[keys] = True
    z = np.arange(big.cardinality)
    x, y = z % (4 * N), z // (4 * N)
    ind = inS[x].astype(float)
    f = DenseFn(big, ind * np.exp(2j * np.pi * ((img[x] * y) % M) / M), bounded=True)
    one = DenseFn(big, ind, bounded=True)
    sigma = len(keys) / N
    inst = LiftedInstance(phi, f, one, sigma, {"ambient": "z", "N": N, "M": M})
    return _verify(inst, sigma / 4) if verify else inst


def _verify(inst: LiftedInstance, floor: float) -> LiftedInstance:
    big = inst.lifted.group
    limit = (1 << F2_VERIFY_DIM) if big.is_f2 else Z_VERIFY_SIZE
    if big.cardinality > limit:
        raise ValueError("lift too large to verify")
    if not is_freiman_hom(inst.source):
        raise NotFreimanError("phi is not a Freiman homomorphism")
    u = gowers_norm_fast(inst.lifted, 3)
    u1 = gowers_norm_fast(inst.support, 3)
    assert abs(u - u1) <= NORM_TOL, f"lifted norm {u} differs from support norm {u1}"
    assert u >= floor - NORM_TOL, f"lifted norm {u} below {floor}"
    return LiftedInstance(inst.source, inst.lifted, inst.support, inst.sigma, inst.meta, u, u1)


# ---------------------------------------------------------------- extraction
def planted_psi(L: np.ndarray, r0: int, n: int, N: int) -> QuadPolyF2:
    """Psi(x, y) = (Lx + r0).y on F_2^{n+N}; L is N x n."""
    L = np.asarray(L, dtype=np.int64).reshape(N, n) & 1
    U = np.zeros((n + N, n + N), dtype=np.int64)
    U[:n, n:] = L.T
    b = np.zeros(n + N, dtype=np.int64)
    b[n:] = (int(r0) >> np.arange(N)) & 1
    return QuadPolyF2(n + N, U, b, 0)


def affine_f2(L: np.ndarray, r0: int, xs) -> np.ndarray:
    L = np.asarray(L, dtype=np.int64)
    N, n = L.shape
    bits = (np.asarray(xs, dtype=np.int64)[..., None] >> np.arange(n)) & 1
    img = (bits @ L.T) & 1
    return (img << np.arange(N)).sum(axis=-1) ^ int(r0)


@dataclass
class ExtractionReport:
    linear: np.ndarray
    offset: int | None
    agreement: list[int]
    support: list[int]
    inner: dict[int, complex]
    kept: list[int]
    large_values: list[int]
    coefficients: list[tuple[int, float]]
    tau: float
    status: str = "ok"
    correlation: float | None = None
    phases_enumerated: int | None = None

    @property
    def agreement_fraction(self) -> float:
        return len(self.agreement) / len(self.support) if self.support else 0.0

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "linear": self.linear.tolist(),
            "offset": self.offset,
            "agreement": self.agreement,
            "agreement_fraction": self.agreement_fraction,
            "kept": self.kept,
            "large_values": self.large_values,
            "inner": {str(k): [v.real, v.imag] for k, v in self.inner.items()},
            "coefficients": [[k, v] for k, v in self.coefficients],
            "tau": self.tau,
            "correlation": self.correlation,
            "phases_enumerated": self.phases_enumerated,
        }


def default_tau(phi: PartialMap, params: Params | None = None) -> float:
    params = params or Params()
    sigma = float(phi.density) or 1.0
    return sigma ** params.C_exponent


def extract_affine_f2(phi: PartialMap, Psi: QuadPolyF2, tau: float | None = None) -> ExtractionReport:
    """Recover an affine map agreeing with phi on part of S from a quadratic Psi on F_2^{n+N}."""
    G, H = phi.domain, phi.codomain
    n, N = G.n, H.n
    if Psi.n != n + N:
        raise ValueError("Psi must live on F_2^{n+N}")
    if n + N > F2_VERIFY_DIM:
        raise ValueError("n + N too large")
    tau = default_tau(phi) if tau is None else float(tau)
    split = mixed_derivative_split(Psi, n)
    g = split.restriction_y.phase()
    ghat = transform(g).coefficients
    keys, vals = phi.arrays()
    psi_x = split.apply(keys) if keys.size else keys
    freq = vals ^ psi_x

    # the inner sums E_y (-1)^{phi(x).y + Psi(x, y)}, computed directly
    Pvals = Psi.values()
    y = np.arange(1 << N)
    inner = {}
    for x, v, fr in zip(keys.tolist(), vals.tolist(), freq.tolist()):
        s = np.mean((1.0 - 2.0 * _dot_bits(np.full_like(y, v), y)) * (1.0 - 2.0 * Pvals[x + (y << n)]))
        assert abs(abs(s) - abs(ghat[fr])) <= 1e-9, "inner sum disagrees with the spectrum"
        inner[x] = complex(s)
    kept = [x for x, fr in zip(keys.tolist(), freq.tolist()) if abs(ghat[fr]) >= tau - 1e-12]
    kept_freq = [int(fr) for x, fr in zip(keys.tolist(), freq.tolist()) if x in set(kept)]
    large = sorted(set(kept_freq))
    assert len(large) <= tau ** -2 + 1e-9, "more large values than Plancherel allows"
    coeffs = [(int(k), float(abs(ghat[k]))) for k in large]
    if not kept:
        return ExtractionReport(split.psi, None, [], keys.tolist(), inner, [], [], [], tau,
                                status="no_survivor")
    counts = Counter(kept_freq)
    r = min(counts, key=lambda v: (-counts[v], v))
    recovered = split.apply(keys) ^ r
    agreement = keys[recovered == vals].tolist()
    return ExtractionReport(split.psi, int(r), agreement, keys.tolist(), inner, kept, large,
                            coeffs, tau)


def end_to_end_f2(phi: PartialMap, Psi: QuadPolyF2 | None = None,
                  tau: float | None = None) -> ExtractionReport:
    inst = lift_f2(phi)
    phases = None
    if Psi is None:
        res = best_quadratic_correlate(inst.lifted)
        Psi, phases = res.psi, res.phases_enumerated
    corr = abs(np.mean(inst.lifted.values * (1.0 - 2.0 * Psi.values())))
    rep = extract_affine_f2(phi, Psi, tau)
    rep.correlation = float(corr)
    rep.phases_enumerated = phases
    return rep
