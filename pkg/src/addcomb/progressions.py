"""Generalised arithmetic progressions, Bohr sets and sublevel-set progressions."""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .lattice import hnf_rows, successive_minima

VOLUME_CAP = 10 ** 6
BOHR_ENUM_CAP = 10 ** 7
SUBLEVEL_C0 = 100


class SearchFailure(RuntimeError):
    pass


class VerificationError(AssertionError):
    pass


def as_fraction(x) -> Fraction:
    """Exact rational for ints, Fractions, decimal strings and floats (by shortest repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(repr(float(x)) if not isinstance(x, str) else x)


def frac_part(t: Fraction) -> Fraction:
    """Representative of t mod 1 in (-1/2, 1/2]."""
    return t - math.ceil(t - Fraction(1, 2))


def circle_norm(t: Fraction) -> Fraction:
    return abs(frac_part(t))


# ---------------------------------------------------------------- GAPs
@dataclass(frozen=True)
class GAP:
    """base + sum l_i x_i with |l_i| <= L_i (symmetric) or l_i in [0, L_i) (box).

    ``modulus`` None means the ambient group is Z^k and points are integer
    tuples; otherwise points are residues mod ``modulus``.
    """
    base: tuple[int, ...] | int
    generators: tuple
    bounds: tuple[int, ...]
    modulus: int | None = None
    mode: str = "symmetric"

    def __post_init__(self):
        if len(self.generators) != len(self.bounds):
            raise ValueError("one bound per generator")
        if any(b < 0 for b in self.bounds):
            raise ValueError("bounds must be nonnegative")
        if self.mode not in ("symmetric", "box"):
            raise ValueError(f"unknown GAP mode {self.mode!r}")

    @property
    def dim(self) -> int:
        return len(self.generators)

    def ranges(self) -> list[range]:
        if self.mode == "symmetric":
            return [range(-L, L + 1) for L in self.bounds]
        return [range(L) for L in self.bounds]

    @property
    def volume(self) -> int:
        return math.prod(len(r) for r in self.ranges())

    def point(self, coeffs: Sequence[int]):
        if self.modulus is not None:
            return (self.base + sum(c * g for c, g in zip(coeffs, self.generators))) % self.modulus
        out = list(self.base)
        for c, g in zip(coeffs, self.generators):
            for j, gj in enumerate(g):
                out[j] += c * gj
        return tuple(out)

    def to_json(self) -> dict:
        ambient = ({"type": "Z", "dim": len(self.base)} if self.modulus is None
                   else {"type": "cyclic", "N": self.modulus})
        conv = (lambda v: v) if self.modulus is not None else list
        return {
            "base": conv(self.base),
            "generators": [conv(g) for g in self.generators],
            "bounds": list(self.bounds),
            "mode": self.mode,
            "ambient": ambient,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GAP":
        amb = obj["ambient"]
        if amb["type"] == "cyclic":
            return cls(int(obj["base"]), tuple(int(g) for g in obj["generators"]),
                       tuple(obj["bounds"]), int(amb["N"]), obj.get("mode", "symmetric"))
        return cls(tuple(obj["base"]), tuple(tuple(g) for g in obj["generators"]),
                   tuple(obj["bounds"]), None, obj.get("mode", "symmetric"))


@dataclass(frozen=True)
class GapEnumeration:
    elements: list
    volume: int
    proper: bool
    max_multiplicity: int


def gap_elements(P: GAP, cap: int = VOLUME_CAP) -> GapEnumeration:
    if P.volume > cap:
        raise ValueError(f"GAP volume {P.volume} exceeds cap {cap}")
    counts = Counter(P.point(c) for c in itertools.product(*P.ranges()))
    mult = max(counts.values())
    return GapEnumeration(sorted(counts), P.volume, mult == 1, mult)


# ---------------------------------------------------------------- Bohr sets
@dataclass(frozen=True)
class BohrSet:
    modulus: int
    freqs: tuple[int, ...]
    radii: tuple[Fraction, ...]

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        if len(self.freqs) != len(self.radii):
            raise ValueError("one radius per frequency")
        object.__setattr__(self, "freqs", tuple(int(r) % self.modulus for r in self.freqs))
        object.__setattr__(self, "radii", tuple(as_fraction(e) for e in self.radii))
        for e in self.radii:
            if not 0 < e < Fraction(1, 2):
                raise ValueError(f"radius {e} outside (0, 1/2)")

    @property
    def dim(self) -> int:
        return len(self.freqs)

    def coprime(self) -> bool:
        return math.gcd(self.modulus, *self.freqs) == 1

    def contains(self, x: int) -> bool:
        M = self.modulus
        for r, e in zip(self.freqs, self.radii):
            t = (r * int(x)) % M
            if Fraction(min(t, M - t), M) > e:
                return False
        return True

    def to_json(self) -> dict:
        return {"M": self.modulus, "freqs": list(self.freqs),
                "radii": [str(e) for e in self.radii]}


def bohr_enumerate(B: BohrSet) -> np.ndarray:
    M = B.modulus
    if M > BOHR_ENUM_CAP:
        raise ValueError(f"modulus {M} above enumeration cap {BOHR_ENUM_CAP}")
    x = np.arange(M, dtype=np.int64)
    keep = np.ones(M, dtype=bool)
    for r, e in zip(B.freqs, B.radii):
        t = (x * r) % M
        dist = np.minimum(t, M - t)
        # dist / M <= p / q  <=>  dist * q <= p * M, exact in int64 at this scale
        keep &= dist * e.denominator <= e.numerator * M
    out = np.nonzero(keep)[0]
    assert np.array_equal(np.unique((-out) % M), out), "Bohr set not symmetric"
    return out


@dataclass(frozen=True)
class BohrGap:
    gap: GAP
    minima: list[Fraction]
    lower_bound: Fraction
    size: int


def bohr_to_gap(B: BohrSet, verify_cap: int = VOLUME_CAP) -> BohrGap:
    """A proper progression inside B of size at least d^-d * prod(eps) * M.

    Uses the lattice Z^d + Z r/M with the box norm given by the radii: if v_i
    realise its successive minima lambda_i, then the multipliers x_i of v_i
    with L_i = floor(1/(d lambda_i)) give the progression, and Minkowski's
    second theorem supplies the size bound.
    """
    if not B.coprime():
        raise ValueError("frequencies and modulus must be coprime")
    M, d = B.modulus, B.dim
    bound = Fraction(1, d ** d) * math.prod(B.radii, start=Fraction(1)) * M if d else Fraction(1)
    if d == 0:
        return BohrGap(GAP(0, (), (), M), [], Fraction(1), 1)
    gens = [list(B.freqs)] + [[M if j == i else 0 for j in range(d)] for i in range(d)]
    basis, tags = hnf_rows(gens, [1] + [0] * d, M)
    # lattice vector u (scaled by M) has box norm max |u_j| / (M eps_j)
    weights = [1 / (M * e) for e in B.radii]
    res = successive_minima(basis, weights, tags, M)
    L = [math.floor(1 / (d * lam)) for lam in res.minima]
    P = GAP(0, tuple(res.tags), tuple(L), M)
    size = P.volume
    if size < bound:
        raise SearchFailure(f"progression of size {size} below bound {bound}")
    if size <= verify_cap:
        pts = gap_elements(P, verify_cap)
        if not pts.proper:
            raise SearchFailure("progression is not proper")
        bad = [x for x in pts.elements if not B.contains(x)]
        if bad:
            raise SearchFailure(f"element {bad[0]} escapes the Bohr set")
    return BohrGap(P, res.minima, bound, size)


# ---------------------------------------------------------------- sublevel sets
@dataclass(frozen=True)
class AffineRZMap:
    """x -> alpha . x + beta, taken mod 1."""
    alpha: tuple[Fraction, ...]
    beta: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(as_fraction(a) for a in self.alpha))
        object.__setattr__(self, "beta", as_fraction(self.beta))

    def __call__(self, x: Sequence[int]) -> Fraction:
        return frac_part(sum((a * int(v) for a, v in zip(self.alpha, x)), self.beta))

    def linear(self, y: Sequence[int]) -> Fraction:
        return frac_part(sum((a * int(v) for a, v in zip(self.alpha, y)), Fraction(0)))

    def to_json(self) -> dict:
        return {"alpha": [str(a) for a in self.alpha], "beta": str(self.beta)}


def next_odd_prime_above(x) -> int:
    n = math.floor(x) + 1
    if n <= 3:
        return 3
    if n % 2 == 0:
        n += 1
    while not _probable_prime(n):
        n += 2
    return n


def _probable_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3e24; pairwise coprimality is re-checked by the caller
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def to_digits(x: int, moduli: Sequence[int]) -> list[int]:
    """Balanced mixed-radix digits: x = x_1 + x_2 M_1 + ..., |x_j| < M_j / 2."""
    x = int(x) % math.prod(moduli)
    out = []
    for m in moduli:
        r = x % m
        if r > m // 2:
            r -= m
        out.append(r)
        x = (x - r) // m
    return out


def from_digits(digits: Sequence[int], moduli: Sequence[int]) -> int:
    x, scale = 0, 1
    for dgt, m in zip(digits, moduli):
        x += dgt * scale
        scale *= m
    return x % scale


@dataclass(frozen=True)
class SublevelReport:
    progression: GAP
    recentred: tuple[int, ...]
    pair: tuple[int, int]
    inner_box: tuple[int, ...]
    moduli: tuple[int, ...]
    bohr: BohrSet | None
    size: int
    ratio: float
    window_ok: bool
    precondition_ok: bool
    elements: list = field(repr=False, default_factory=list)

    def to_json(self) -> dict:
        return {
            "progression": self.progression.to_json(),
            "recentred": list(self.recentred),
            "pair": list(self.pair),
            "inner_box": list(self.inner_box),
            "moduli": [str(m) for m in self.moduli],
            "size": self.size,
            "ratio": self.ratio,
            "window_ok": self.window_ok,
            "precondition_ok": self.precondition_ok,
        }


def _check_sublevel(Q: GAP, eta: AffineRZMap, eps: Fraction, N: Sequence[int], d: int) -> list:
    elems = gap_elements(Q).elements
    for p in elems:
        if any(not 1 <= v <= n for v, n in zip(p, N)):
            raise VerificationError(f"{p} leaves the box")
        if circle_norm(eta(p)) > eps:
            raise VerificationError(f"|eta({p})| exceeds eps")
    if Q.dim > d + 1 or not elems:
        raise VerificationError("bad output dimension or empty output")
    return elems


def sublevel_progression(box: Sequence[int], eta: AffineRZMap, eps, vanish_point: Sequence[int],
                         strict: bool = False) -> SublevelReport:
    """A progression of dimension <= d+1 inside {x in [N_1]x...x[N_d] : |eta(x)| <= eps}.

    The box is {1..N_j} in each coordinate and ``vanish_point`` must be a zero
    of eta.  With ``strict`` the side-length precondition N_j > C0/eps raises;
    otherwise it is only reported.
    """
    eps = as_fraction(eps)
    N = [int(n) for n in box]
    d = len(N)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError("eps must lie in (0, 1/2)")
    if len(eta.alpha) != d or len(vanish_point) != d:
        raise ValueError("dimension mismatch")
    xs = [int(v) for v in vanish_point]
    if any(not 1 <= v <= n for v, n in zip(xs, N)):
        raise ValueError("vanishing point outside the box")
    if abs(float(eta(xs))) > 1e-12:
        raise ValueError(f"eta does not vanish at {xs}")
    pre_ok = all(n * eps > SUBLEVEL_C0 for n in N)
    if strict and not pre_ok:
        raise ValueError(f"side lengths must exceed {SUBLEVEL_C0}/eps")

    if all(a.denominator == 1 for a in eta.alpha):
        # eta is identically zero mod 1: the whole box qualifies
        box_gap = GAP(tuple(1 for _ in N), tuple(tuple(int(i == j) for j in range(d)) for i in range(d)),
                      tuple(N), mode="box")
        elems = _check_sublevel(box_gap, eta, eps, N, d)
        size = len(elems)
        ratio = float(Fraction(size, math.prod(N)) * eps ** -(d + 1) * d ** d)
        return SublevelReport(box_gap, tuple(xs), (0, 0), tuple(N), (), None, size, ratio,
                              True, pre_ok, elems)

    # reflect coordinates so the zero sits in the lower half
    flip = [2 * v > n + 1 for v, n in zip(xs, N)]
    alpha = [-a if f else a for a, f in zip(eta.alpha, flip)]
    xr = [n + 1 - v if f else v for v, n, f in zip(xs, N, flip)]

    m = math.ceil(2 / eps) + 1
    pts = [[(i * n) // (3 * m) for n in N] for i in range(1, m + 1)]
    lin = AffineRZMap(tuple(alpha))
    pair = next((s, t) for s in range(m) for t in range(s + 1, m)
                if circle_norm(lin.linear([a - b for a, b in zip(pts[t], pts[s])])) <= eps / 2)
    s, t = pair
    xx = [v + a - b for v, a, b in zip(xr, pts[t], pts[s])]
    window_ok = all(eps * n / 10 <= v <= (1 - eps / 10) * n for v, n in zip(xx, N))

    Np = [max(1, min(math.floor(eps * n / 10), v - 1, n - v)) for v, n in zip(xx, N)]
    big = max(Np)
    scale = Fraction(10 ** 4 * d) / eps * big
    moduli = [next_odd_prime_above(scale)]
    for _ in range(d - 1):
        moduli.insert(0, next_odd_prime_above(scale * moduli[0]))
    for a, b in itertools.combinations(moduli, 2):
        if math.gcd(a, b) != 1:
            raise VerificationError("moduli are not coprime")
    M = math.prod(moduli)
    r = [math.prod(moduli[j + 1:]) for j in range(d)]
    svals = [math.ceil(a * mj - Fraction(1, 2)) % mj for a, mj in zip(alpha, moduli)]
    r_last = sum(rj * sj for rj, sj in zip(r, svals)) % M
    radii = [Fraction(n, 2 * mj) for n, mj in zip(Np, moduli)] + [eps / 4]
    B = BohrSet(M, tuple(r) + (r_last,), tuple(radii))
    bg = bohr_to_gap(B, verify_cap=0)

    gens = [to_digits(g, moduli) for g in bg.gap.generators]
    Q = GAP(tuple(xx), tuple(tuple(g) for g in gens), bg.gap.bounds)
    pts_q = gap_elements(Q)
    # verify linearity of the digit map on the Bohr progression and the containment
    for coeffs in itertools.product(*bg.gap.ranges()):
        x = bg.gap.point(coeffs)
        if not B.contains(x):
            raise VerificationError(f"{x} escapes the Bohr set")
        y = tuple(v - b for v, b in zip(Q.point(coeffs), xx))
        if to_digits(x, moduli) != list(y):
            raise VerificationError("digit expansion is not additive on the progression")
    if not pts_q.proper:
        raise VerificationError("output progression is not proper")

    # undo the reflection
    base = tuple(n + 1 - v if f else v for v, n, f in zip(xx, N, flip))
    gens_out = tuple(tuple(-g[j] if flip[j] else g[j] for j in range(d)) for g in Q.generators)
    out = GAP(base, gens_out, Q.bounds)
    elems = _check_sublevel(out, eta, eps, N, d)
    size = len(elems)
    ratio = float(Fraction(size, math.prod(N)) * eps ** -(d + 1) * d ** d)
    return SublevelReport(out, tuple(xx), pair, tuple(Np), tuple(moduli), B, size, ratio,
                          window_ok, pre_ok, elems)
