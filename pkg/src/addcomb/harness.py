"""Seeded experiment suites with deterministic JSON Lines reports.

Instance ``i`` of a suite draws from ``np.random.default_rng([seed, i])`` so it
does not depend on how many instances run or on the thread count.  Records
hold no wall-clock data, which keeps reports byte-identical across runs.
"""
from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import metadata
from pathlib import Path
from typing import Callable

import numpy as np

from . import fourier, gowers, lift, nil, progressions, quadratic, sumsets
from .groups import DenseFn, GroupSpec, PartialMap

DEFAULT_TOL = 1e-9
PACKAGE_DIR = Path(__file__).resolve().parent


def build_digest() -> str:
    h = hashlib.sha256()
    for path in sorted(PACKAGE_DIR.glob("*.py")):
        h.update(path.name.encode())
        h.update(path.read_bytes())
    return h.hexdigest()[:16]


def version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:16]


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"cannot serialise {type(x).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, default=_jsonable)


@dataclass
class RunConfig:
    suite: str
    seed: int = 0
    instances: int | None = None
    threads: int = 1
    tol: float = DEFAULT_TOL
    out: str | None = None
    csv: str | None = None

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}; choose from {sorted(SUITES)}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.threads < 1:
            raise ValueError("threads must be positive")

    @property
    def count(self) -> int:
        return SUITES[self.suite].default_count if self.instances is None else int(self.instances)


@dataclass
class Report:
    config: RunConfig
    records: list[dict]
    summary: dict

    @property
    def passed(self) -> bool:
        return self.summary["all_passed"]

    def jsonl(self) -> str:
        lines = [dumps(r) for r in self.records]
        lines.append(dumps({"summary": self.summary}))
        return "\n".join(lines) + "\n"

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "quantity", "min", "median", "max"])
        for key, stats in sorted(self.summary["ratios"].items()):
            w.writerow([self.summary["suite"], key, stats["min"], stats["median"], stats["max"]])
        return buf.getvalue()


@dataclass(frozen=True)
class Suite:
    default_count: int
    run: Callable[[np.random.Generator, int, float], dict]
    ratios: tuple[str, ...] = ()
    extra: Callable[[float], dict] | None = None


# ---------------------------------------------------------------- suites
ORACLE_GROUPS = [GroupSpec.vector(2, 4), GroupSpec.vector(2, 5), GroupSpec.vector(2, 6),
                 GroupSpec.cyclic(16), GroupSpec.cyclic(24), GroupSpec.cyclic(48)]


def random_bounded(rng: np.random.Generator, group: GroupSpec) -> DenseFn:
    size = group.cardinality
    r = np.sqrt(rng.random(size))
    return DenseFn(group, r * np.exp(2j * np.pi * rng.random(size)), bounded=True)


def _gowers_oracle(rng, i, tol):
    G = ORACLE_GROUPS[i % len(ORACLE_GROUPS)]
    f = random_bounded(rng, G)
    rec = {"group": G.to_json()}
    ok = True
    for k in (2, 3):
        fast, naive = gowers.gowers_norm_fast(f, k), gowers.gowers_norm_naive(f, k)
        rec[f"u{k}_fast"], rec[f"u{k}_naive"] = fast, naive
        ok &= abs(fast - naive) <= tol
    spectral = float(np.sum(np.abs(fourier.transform(f).coefficients) ** 4))
    rec["u2_spectral_gap"] = abs(gowers.gowers_power_naive(f, 2).real - spectral)
    mono = gowers.monotonicity_check(f, tol)
    rec["u1"] = mono.u1
    ok &= rec["u2_spectral_gap"] <= tol and mono.passed
    rec["digest"] = _digest(f.to_json())
    rec["passed"] = bool(ok)
    return rec


def _random_affine_f2(rng, n, N, density=None):
    density = rng.uniform(0.2, 1.0) if density is None else density
    S = [s for s in range(1 << n) if rng.random() < density] or [int(rng.integers(1 << n))]
    L = rng.integers(0, 2, (N, n))
    r0 = int(rng.integers(1 << N))
    phi = PartialMap(GroupSpec.vector(2, n), GroupSpec.vector(2, N),
                     dict(zip(S, lift.affine_f2(L, r0, S).tolist())))
    return phi, L, r0


def _lift_f2(rng, i, tol):
    n, N = (int(v) for v in rng.integers(1, 5, 2))
    phi, L, r0 = _random_affine_f2(rng, n, N)
    inst = lift.lift_f2(phi)
    u = gowers.gowers_norm_fast(inst.lifted, 3)
    u1 = gowers.gowers_norm_fast(inst.support, 3)
    return {"n": n, "N": N, "sigma": inst.sigma, "u3": u, "u3_support": u1,
            "ratio_u3_over_sigma": u / inst.sigma,
            "digest": _digest(phi.to_json()),
            "passed": bool(u >= inst.sigma - tol and abs(u - u1) <= tol)}


def non_freiman_gap() -> float:
    """U^3 gap for phi(x1, x2) = x1 x2 on all of F_2^2, which is not Freiman."""
    G, H = GroupSpec.vector(2, 2), GroupSpec.vector(2, 1)
    phi = PartialMap(G, H, {x: (x & 1) & (x >> 1) for x in range(4)})
    inst = lift.lift_f2(phi)
    return abs(gowers.gowers_norm_fast(inst.lifted, 3) - gowers.gowers_norm_fast(inst.support, 3))


def _lift_f2_extra(tol):
    gap = non_freiman_gap()
    return {"non_freiman_gap": gap, "non_freiman_passed": gap > 1e-3}


def _lift_z(rng, i, tol):
    N, M = (int(v) for v in rng.integers(1, 9, 2))
    S = [s for s in range(1, N + 1) if rng.random() < rng.uniform(0.3, 1.0)] or [1]
    a, b = (int(v) for v in rng.integers(0, M, 2))
    phi = PartialMap(GroupSpec.cyclic(4 * N), GroupSpec.cyclic(M), {s: (a * s + b) % M for s in S})
    inst = lift.lift_z(phi, N)
    u = gowers.gowers_norm_fast(inst.lifted, 3)
    u1 = gowers.gowers_norm_fast(inst.support, 3)
    return {"N": N, "M": M, "sigma": inst.sigma, "u3": u, "u3_support": u1,
            "ratio_u3_over_quarter_sigma": u / (inst.sigma / 4),
            "digest": _digest(phi.to_json()),
            "passed": bool(u >= inst.sigma / 4 - tol and abs(u - u1) <= tol)}


def _extract_planted(rng, i, tol):
    n, N = (int(v) for v in rng.integers(1, 5, 2))
    phi, L, r0 = _random_affine_f2(rng, n, N)
    rep = lift.extract_affine_f2(phi, lift.planted_psi(L, r0, n, N))
    ok = rep.agreement_fraction == 1.0 and len(rep.large_values) <= rep.tau ** -2 + 1e-9
    return {"n": n, "N": N, "agreement_fraction": rep.agreement_fraction,
            "large_values": len(rep.large_values), "tau": rep.tau,
            "digest": _digest(phi.to_json()), "passed": bool(ok)}


def _end_to_end(rng, i, tol):
    n = int(rng.integers(1, 4))
    N = 4 - n
    phi, L, r0 = _random_affine_f2(rng, n, N)
    rep = lift.end_to_end_f2(phi)
    return {"n": n, "N": N, "agreement": len(rep.agreement), "support": len(rep.support),
            "correlation": rep.correlation, "phases": rep.phases_enumerated,
            "digest": _digest(phi.to_json()),
            "passed": bool(len(rep.agreement) == len(rep.support) and rep.phases_enumerated == 1 << 15)}


def radical_rank(A: np.ndarray, p: int) -> int:
    """N - log_p |{h : A h = 0}| by brute force over F_p^N."""
    N = A.shape[0]
    H = quadratic.digits_p(np.arange(p ** N), p, N)
    rad = int(np.count_nonzero(np.all((H @ A) % p == 0, axis=1)))
    return N - round(math.log(rad, p))


def _random_symmetric(rng, p, N):
    C = rng.integers(0, p, (N, N))
    return (np.triu(C) + np.triu(C, 1).T) % p


def _gauss(rng, i, tol):
    p = 5
    N = int(rng.integers(1, 4))
    A = _random_symmetric(rng, p, N)
    # low-rank forms are drawn often enough to see both branches of the dichotomy
    if rng.random() < 0.5:
        v = rng.integers(0, p, (1, N))
        A = (v.T @ v * int(rng.integers(1, p))) % p
    lin = rng.integers(0, p, N) if rng.random() < 0.5 else (A @ rng.integers(0, p, N)) % p
    res = quadratic.gauss_sum(quadratic.QuadFormFp(p, A, lin))
    rank = radical_rank(A, p)
    target = p ** (-rank / 2)
    ok = rank == res.rank and (res.magnitude <= tol or abs(res.magnitude - target) <= tol)
    return {"N": N, "rank": rank, "magnitude": res.magnitude,
            "digest": _digest({"A": A.tolist(), "lin": lin.tolist()}), "passed": bool(ok)}


def planted_family(rng, p, n, N, r):
    while True:
        Vb = rng.integers(0, p, (r, N))
        if quadratic.rank_mod_p(Vb, p) == r:
            break
    forms = tuple(quadratic.QuadFormFp(p, (Vb.T @ _random_symmetric(rng, p, r) @ Vb) % p)
                  for _ in range(n))
    return quadratic.LinearFormFamily(p, n, N, forms), Vb


def _rank_line(rng, i, tol):
    p = 5
    n = int(rng.integers(1, 4))
    N = int(rng.integers(1, 5))
    r = int(rng.integers(1, min(2, N) + 1))
    fam, Vb = planted_family(rng, p, n, N, r)
    dens = rng.uniform(0.3, 1.0)
    A = [x for x in range(p ** n) if rng.random() < dens] or [int(rng.integers(p ** n))]
    rep = quadratic.rank_line_recover(fam, A, r)
    V = rep.V
    contained = sum(
        quadratic.span_basis(np.vstack([V, fam.subspace(x)]), p, N).shape[0] == V.shape[0]
        for x in A)
    stats = quadratic.additive_quadruple_stats(A, fam)
    alpha = Fraction(len(A), p ** n)
    ok = (V.shape[0] <= r and contained == len(A)
          and stats.quadruples >= alpha ** 4 * p ** (3 * n))
    return {"n": n, "N": N, "r": r, "dim_V": int(V.shape[0]), "contained_fraction": contained / len(A),
            "quadruples": stats.quadruples, "good": stats.good, "bad": stats.bad,
            "ratio_quadruples_over_bound": stats.quadruples / float(alpha ** 4 * p ** (3 * n)),
            "digest": _digest(fam.to_json()), "passed": bool(ok)}


def _bohr(rng, i, tol):
    d = int(rng.integers(1, 3))
    M = int(rng.integers(50, 2001))
    while True:
        r = [int(v) for v in rng.integers(0, M, d)]
        if math.gcd(M, *r) == 1:
            break
    eps = [Fraction(int(k), 100) for k in rng.integers(1, 50, d)]
    B = progressions.BohrSet(M, tuple(r), tuple(eps))
    bg = progressions.bohr_to_gap(B)
    pts = progressions.gap_elements(bg.gap)
    members = set(progressions.bohr_enumerate(B).tolist())
    contained = set(pts.elements) <= members
    ok = pts.proper and contained and bg.size >= bg.lower_bound
    return {"d": d, "M": M, "size": bg.size, "bound": bg.lower_bound, "bohr_size": len(members),
            "ratio_size_over_bound": float(bg.size / bg.lower_bound),
            "digest": _digest(B.to_json()), "passed": bool(ok)}


def _sublevel(rng, i, tol):
    d = int(rng.integers(1, 3))
    eps = Fraction(1, 10)
    box = [int(v) for v in rng.integers(50, 201, d)]
    alpha = [progressions.as_fraction(round(float(a), 6)) for a in rng.random(d)]
    xs = [int(rng.integers(1, n + 1)) for n in box]
    beta = -sum(a * x for a, x in zip(alpha, xs))
    eta = progressions.AffineRZMap(tuple(alpha), beta)
    rep = progressions.sublevel_progression(box, eta, eps, xs)
    # independent check against the exhaustive sublevel set
    sub = {p for p in itertools.product(*(range(1, n + 1) for n in box))
           if progressions.circle_norm(eta(p)) <= eps}
    ok = set(rep.elements) <= sub and rep.progression.dim <= d + 1 and rep.size >= 1
    return {"d": d, "box": box, "size": rep.size, "sublevel_size": len(sub),
            "ratio_achieved": rep.ratio, "window_ok": rep.window_ok,
            "precondition_ok": rep.precondition_ok,
            "digest": _digest({"box": box, "eta": eta.to_json(), "x": xs}), "passed": bool(ok)}


def _covering(rng, i, tol):
    if i < 3:
        N = (5, 50, 500)[i]
        cert = sumsets.is_k_approximate_integers(range(-N, N + 1), 3)
        return {"interval": N, "verdict": cert.verdict.value, "translates": len(cert.translates),
                "digest": _digest({"N": N}), "passed": cert.verdict is sumsets.Verdict.YES}
    if rng.random() < 0.5:
        G = GroupSpec.vector(2, int(rng.integers(2, 7)))
    else:
        G = GroupSpec.cyclic(int(rng.integers(4, 65)))
    size = G.cardinality
    A = sorted({int(v) for v in rng.integers(0, size, int(rng.integers(1, size + 1)))})
    B = sorted({int(v) for v in rng.integers(0, size, int(rng.integers(1, size + 1)))})
    X = sumsets.ruzsa_cover(A, B, G)
    AB = sumsets.sumset(A, B, G)
    cover = set(sumsets.sumset(X, sumsets.difference_set(B, B, G), G).tolist())
    ok = len(X) <= len(AB) // len(B) and set(A) <= cover
    return {"group": G.to_json(), "X": len(X), "bound": len(AB) // len(B),
            "digest": _digest({"A": A, "B": B}), "passed": bool(ok)}


def _rand_fraction(rng) -> Fraction:
    return Fraction(int(rng.integers(-60, 61)), int(rng.integers(1, 13)))


def _heisenberg(rng, i, tol):
    H = nil.HeisenbergElem
    x, y, z = (H(_rand_fraction(rng), _rand_fraction(rng), _rand_fraction(rng)) for _ in range(3))
    n = int(rng.integers(-20, 21))
    ids = nil.check_commutator_identities(x, y, n, z)
    frac, integral = nil.heis_reduce(x)
    round_trip = frac * integral == x and integral.is_integral()
    N = int(rng.integers(1, 20))
    xpt = int(rng.integers(1, N + 1))
    centre = (_rand_fraction(rng) / 10, _rand_fraction(rng) / 10)
    br = nil.bridge_check(x, int(rng.integers(-3, 4)), N, xpt, centre)
    ok = ids.passed and round_trip and br.deviation <= tol
    return {"identities": ids.passed, "round_trip": round_trip, "bridge_deviation": br.deviation,
            "digest": _digest([x.to_json(), y.to_json(), z.to_json(), n]), "passed": bool(ok)}


def _sieve(rng, i, tol):
    M = int(rng.integers(1, 65))
    f = rng.normal(size=M) + 1j * rng.normal(size=M)
    k = int(rng.integers(1, 12))
    thetas = sorted(set(np.round(rng.random(k), 6).tolist()))
    res = fourier.large_sieve_check(f, thetas)
    return {"M": M, "points": len(thetas), "lhs": res.lhs, "rhs": res.rhs,
            "ratio_lhs_over_rhs": res.ratio,
            "digest": _digest({"f": [[v.real, v.imag] for v in f], "thetas": thetas}),
            "passed": bool(res.passed)}


SUITES: dict[str, Suite] = {
    "gowers-oracle": Suite(600, _gowers_oracle),
    "lift-f2": Suite(100, _lift_f2, ("ratio_u3_over_sigma",), _lift_f2_extra),
    "lift-z": Suite(50, _lift_z, ("ratio_u3_over_quarter_sigma",)),
    "extract-planted": Suite(100, _extract_planted),
    "end-to-end": Suite(25, _end_to_end),
    "gauss": Suite(200, _gauss),
    "rank-line": Suite(50, _rank_line, ("ratio_quadruples_over_bound", "contained_fraction")),
    "bohr": Suite(50, _bohr, ("ratio_size_over_bound",)),
    "sublevel": Suite(25, _sublevel, ("ratio_achieved",)),
    "covering": Suite(203, _covering),
    "heisenberg": Suite(1000, _heisenberg),
    "sieve": Suite(50, _sieve, ("ratio_lhs_over_rhs",)),
}


def _one(cfg: RunConfig, index: int) -> dict:
    rng = np.random.default_rng([int(cfg.seed), index])
    try:
        rec = SUITES[cfg.suite].run(rng, index, cfg.tol)
    except Exception as exc:  # surfaced per instance rather than aborting the run
        rec = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
    return {"index": index, **rec}


def run_suite(cfg: RunConfig) -> Report:
    suite = SUITES[cfg.suite]
    indices = range(cfg.count)
    if cfg.threads == 1:
        records = [_one(cfg, i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            records = list(pool.map(lambda i: _one(cfg, i), indices))
    ratios = {}
    for key in suite.ratios:
        vals = [r[key] for r in records if key in r]
        if vals:
            ratios[key] = {"min": min(vals), "median": statistics.median(vals), "max": max(vals)}
    summary = {
        "suite": cfg.suite,
        "seed": int(cfg.seed),
        "instances": len(records),
        "passed": sum(bool(r["passed"]) for r in records),
        "failed": [r["index"] for r in records if not r["passed"]],
        "ratios": ratios,
        "build": build_digest(),
        "version": version(),
    }
    if suite.extra is not None:
        extra = suite.extra(cfg.tol)
        summary.update(extra)
    summary["all_passed"] = not summary["failed"] and all(
        v for k, v in summary.items() if k.endswith("_passed") and k != "all_passed")
    report = Report(cfg, records, summary)
    if cfg.out:
        Path(cfg.out).write_text(report.jsonl())
    if cfg.csv:
        Path(cfg.csv).write_text(report.csv_text())
    return report
