"""Sumsets, doubling, covering and approximate-group certificates."""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .fourier import fwht
from .groups import GroupSpec

EXACT_CANDIDATE_LIMIT = 20
PRUNE_CANDIDATE_LIMIT = 1500


def _arr(A: Iterable[int]) -> np.ndarray:
    return np.unique(np.fromiter((int(a) for a in A), dtype=np.int64))


def _mask(A: np.ndarray, group: GroupSpec) -> np.ndarray:
    m = np.zeros(group.cardinality, dtype=bool)
    m[A] = True
    return m


def sumset(A: Iterable[int], B: Iterable[int], group: GroupSpec) -> np.ndarray:
    """A + B as a sorted index array."""
    A, B = _arr(A), _arr(B)
    if A.size == 0 or B.size == 0:
        return np.zeros(0, dtype=np.int64)
    if group.is_f2 and A.size * B.size > 4 * group.cardinality:
        # support of the convolution 1_A * 1_B
        conv = fwht(fwht(_mask(A, group).astype(float)) * fwht(_mask(B, group).astype(float)))
        return np.nonzero(conv > 0.5 * group.cardinality)[0]
    out = []
    step = max(1, (1 << 22) // max(1, B.size))
    for i in range(0, A.size, step):
        out.append(np.unique(group.add(A[i:i + step, None], B[None, :])))
    return np.unique(np.concatenate(out))


def difference_set(A: Iterable[int], B: Iterable[int], group: GroupSpec) -> np.ndarray:
    return sumset(A, group.neg(_arr(B)), group)


def iterated(A: Iterable[int], k: int, group: GroupSpec) -> np.ndarray:
    """kA = A + ... + A (k >= 1 copies)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    A = _arr(A)
    out = A
    for _ in range(k - 1):
        out = sumset(out, A, group)
    return out


def doubling_constant(A: Iterable[int], group: GroupSpec) -> Fraction:
    A = _arr(A)
    if A.size == 0:
        raise ValueError("doubling constant of the empty set")
    return Fraction(len(sumset(A, A, group)), len(A))


def ruzsa_cover(A: Iterable[int], B: Iterable[int], group: GroupSpec) -> list[int]:
    """Greedy maximal X in A with x + B pairwise disjoint; then A is in X + B - B."""
    A, B = _arr(A), _arr(B)
    if B.size == 0:
        raise ValueError("B must be nonempty")
    used = np.zeros(group.cardinality, dtype=bool)
    X: list[int] = []
    for a in A:
        tr = group.add(a, B)
        if not used[tr].any():
            used[tr] = True
            X.append(int(a))
    if A.size:
        assert len(X) <= len(sumset(A, B, group)) // len(B)
        bb = difference_set(B, B, group)
        covered = _mask(sumset(X, bb, group), group)
        assert covered[A].all(), "A is not covered by X + B - B"
    return X


class Verdict(str, enum.Enum):
    YES = "yes_certified"
    NO = "no_certified"
    UNKNOWN = "unknown"


@dataclass
class CoverCertificate:
    verdict: Verdict
    translates: list[int] = field(default_factory=list)
    method: str = ""
    reason: str = ""
    modulus: int | None = None

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "translates": self.translates,
            "method": self.method,
            "reason": self.reason,
            "modulus": self.modulus,
        }


def _cover(target: np.ndarray, base: np.ndarray, candidates: np.ndarray,
           budget: int, group: GroupSpec) -> tuple[Verdict, list[int], str]:
    """Cover ``target`` with at most ``budget`` translates c + base, c in candidates."""
    if target.size == 0:
        return Verdict.YES, [], "empty"
    if budget < 1:
        return Verdict.NO, [], "budget"
    pos = np.full(group.cardinality, -1, dtype=np.int64)
    pos[target] = np.arange(target.size)
    hits = pos[group.add(candidates[:, None], base[None, :])]
    cover_sets = [np.unique(h[h >= 0]) for h in hits]

    # greedy max-coverage, ties to the smallest candidate index
    covered = np.zeros(target.size, dtype=bool)
    chosen: list[int] = []
    while not covered.all() and len(chosen) < budget:
        gains = np.array([np.count_nonzero(~covered[s]) for s in cover_sets])
        best = int(np.argmax(gains))
        if gains[best] == 0:
            break
        chosen.append(int(candidates[best]))
        covered[cover_sets[best]] = True
    if covered.all():
        return Verdict.YES, chosen, "greedy"

    if len(candidates) > PRUNE_CANDIDATE_LIMIT:
        return Verdict.UNKNOWN, [], "greedy failed; too many candidates"
    masks = {}
    for c, s in zip(candidates.tolist(), cover_sets):
        m = 0
        for i in s.tolist():
            m |= 1 << i
        if m and m not in masks:
            masks[m] = c
    items = sorted(masks.items(), key=lambda kv: kv[1])
    kept = [(m, c) for m, c in items
            if not any(o != m and (m | o) == o for o, _ in items)]
    if len(kept) > EXACT_CANDIDATE_LIMIT:
        return Verdict.UNKNOWN, [], "greedy failed; exact search too large"
    full = (1 << target.size) - 1
    for size in range(1, min(budget, len(kept)) + 1):
        for combo in itertools.combinations(kept, size):
            acc = 0
            for m, _ in combo:
                acc |= m
            if acc == full:
                return Verdict.YES, sorted(c for _, c in combo), "exact"
    return Verdict.NO, [], "exact"


def is_symmetric(A: Iterable[int], group: GroupSpec) -> bool:
    A = _arr(A)
    return np.array_equal(np.unique(group.neg(A)), A)


def is_k_approximate(A: Iterable[int], K: float, group: GroupSpec) -> CoverCertificate:
    """Is A symmetric with A + A covered by at most K translates of A?"""
    if K < 1:
        raise ValueError("K must be >= 1")
    A = _arr(A)
    if A.size == 0:
        return CoverCertificate(Verdict.NO, reason="empty set")
    if not is_symmetric(A, group):
        bad = [int(a) for a in A if not np.isin(group.neg(a), A)]
        return CoverCertificate(Verdict.NO, reason=f"not symmetric: -{bad[0]} missing",
                                method="symmetry")
    target = sumset(A, A, group)
    # every useful shift lies in A + A - A; A + A is scanned first
    shifts = difference_set(target, A, group)
    candidates = np.concatenate([target, np.setdiff1d(shifts, target)])
    verdict, X, method = _cover(target, A, candidates, math.floor(K), group)
    return CoverCertificate(verdict, X, method)


def controls(B: Iterable[int], A: Iterable[int], K: float, group: GroupSpec) -> CoverCertificate:
    """Does B K-control A (|B| <= K|A| and A in B + X with |X| <= K)?"""
    if K < 1:
        raise ValueError("K must be >= 1")
    A, B = _arr(A), _arr(B)
    if B.size > K * A.size:
        return CoverCertificate(Verdict.NO, method="cardinality",
                                reason=f"|B| = {B.size} > K|A|")
    if A.size == 0:
        return CoverCertificate(Verdict.YES, method="empty")
    if B.size == 0:
        return CoverCertificate(Verdict.NO, method="cardinality", reason="B empty")
    candidates = difference_set(A, B, group)
    verdict, X, method = _cover(A, B, candidates, math.floor(K), group)
    return CoverCertificate(verdict, X, method)


def embed_integers(values: Sequence[int]) -> tuple[GroupSpec, list[int]]:
    """Place a finite set of integers in Z/MZ with M > 8 * diameter."""
    vals = [int(v) for v in values]
    diam = (max(vals) - min(vals)) if vals else 0
    M = 8 * diam + 1
    return GroupSpec.cyclic(M), sorted({v % M for v in vals})


def is_k_approximate_integers(values: Sequence[int], K: float) -> CoverCertificate:
    group, idx = embed_integers(values)
    cert = is_k_approximate(idx, K, group)
    cert.modulus = group.N
    return cert


def interval(lo: int, hi: int, group: GroupSpec) -> list[int]:
    return sorted({v % group.N for v in range(lo, hi + 1)})
