"""Command-line entry point: ``addcomb <command> ...``.

Every command reads JSON files (``-`` means stdin) and prints one JSON object.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import fourier, freiman, gowers, harness, lift, nil, progressions, quadratic, sumsets
from .groups import DenseFn, GroupSpec, PartialMap, set_from_json


def load_json(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return json.loads(text)


def emit(obj, out: str | None = None) -> None:
    text = harness.dumps(obj)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _floats(text: str) -> list[str]:
    return [t for t in text.split(",") if t]


def _values(obj) -> np.ndarray:
    """Complex values from a DenseFn-style object or a bare list."""
    vals = obj["values"] if isinstance(obj, dict) else obj
    out = []
    for v in vals:
        out.append(complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v))
    return np.asarray(out, dtype=np.complex128)


# ---------------------------------------------------------------- commands
def cmd_fft(a):
    f = DenseFn.from_json(load_json(a.inp))
    emit(fourier.transform(f).to_json(), a.out)


def cmd_sieve(a):
    vals = _values(load_json(a.inp))
    thetas = [float(t) for t in load_json(a.thetas)]
    res = fourier.large_sieve_check(vals, thetas, a.delta)
    emit({"lhs": res.lhs, "rhs": res.rhs, "ratio": res.ratio, "passed": res.passed})
    return 0 if res.passed else 1


def cmd_gowers(a):
    f = DenseFn.from_json(load_json(a.inp))
    t = time.perf_counter()
    norm = gowers.gowers_norm(f, a.k, a.method)
    emit({"norm": norm, "k": a.k, "method": a.method,
          "runtime_ms": round(1000 * (time.perf_counter() - t), 3)})


def cmd_freiman(a):
    phi = PartialMap.from_json(load_json(a.map))
    res = freiman.is_freiman_hom(phi) if a.order == 2 else freiman.is_freiman_quadratic(phi)
    out = {"order": a.order, "ok": res.ok, "witness": res.witness}
    if a.order == 2:
        out["isomorphism"] = freiman.is_freiman_iso(phi) if res.ok else False
    emit(out)


def cmd_dense_model(a):
    obj = load_json(a.set)
    group = GroupSpec.from_json(obj["group"])
    if not group.is_f2:
        raise SystemExit("dense-model needs a subset of F_2^N")
    model = freiman.dense_model_f2(obj["indices"], group.n)
    emit(model.to_json())


def cmd_approx_group(a):
    obj = load_json(a.set)
    if "integers" in obj:
        cert = sumsets.is_k_approximate_integers(obj["integers"], a.K)
    else:
        group, A = set_from_json(obj)
        cert = sumsets.is_k_approximate(A, a.K, group)
    emit(cert.to_json())
    return 0 if cert.verdict is sumsets.Verdict.YES else 1


def cmd_bohr(a):
    freqs = [int(t) for t in _floats(a.freqs)]
    radii = [Fraction(t) for t in _floats(a.radii)]
    B = progressions.BohrSet(a.M, tuple(freqs), tuple(radii))
    out = {"bohr": B.to_json()}
    if a.M <= progressions.BOHR_ENUM_CAP:
        out["elements"] = progressions.bohr_enumerate(B).tolist()
    if a.to_gap:
        bg = progressions.bohr_to_gap(B)
        out["gap"] = bg.gap.to_json()
        out["size"] = bg.size
        out["lower_bound"] = str(bg.lower_bound)
        out["minima"] = [str(m) for m in bg.minima]
    emit(out)


def cmd_sublevel(a):
    box = [int(t) for t in a.box.lower().split("x")]
    alpha = [progressions.as_fraction(t) for t in _floats(a.alpha)]
    zero = [int(t) for t in _floats(a.zero)] if a.zero else [(n + 1) // 2 for n in box]
    beta = -sum(x * z for x, z in zip(alpha, zero))
    eta = progressions.AffineRZMap(tuple(alpha), beta)
    rep = progressions.sublevel_progression(box, eta, Fraction(a.eps), zero, strict=a.strict)
    emit(rep.to_json())


def cmd_quad_split(a):
    Psi = quadratic.QuadPolyF2.from_json(load_json(a.psi))
    if Psi.n != a.n + a.N:
        raise SystemExit(f"psi has dimension {Psi.n}, expected {a.n + a.N}")
    split = quadratic.mixed_derivative_split(Psi, a.n)
    emit({"psi": split.psi.tolist(), "restriction_y": split.restriction_y.to_json(),
          "restriction_x": split.restriction_x.to_json()})


def cmd_rank_line(a):
    fam = quadratic.LinearFormFamily.from_json(load_json(a.family))
    obj = load_json(a.set)
    A = obj["indices"] if isinstance(obj, dict) else obj
    rep = quadratic.rank_line_recover(fam, A, a.r)
    out = rep.to_json()
    stats = quadratic.additive_quadruple_stats(A, fam)
    out["quadruples"] = {"count": stats.quadruples, "good": stats.good, "bad": stats.bad,
                         "lower_bound": stats.lower_bound}
    emit(out)


def cmd_lift(a):
    phi = PartialMap.from_json(load_json(a.map))
    if a.ambient == "f2":
        inst = lift.lift_f2(phi, verify=a.verify)
    else:
        inst = lift.lift_z(phi, phi.domain.N // 4, verify=a.verify)
    emit(inst.to_json(), a.out)


def cmd_extract(a):
    phi = PartialMap.from_json(load_json(a.map))
    if a.psi:
        Psi = quadratic.QuadPolyF2.from_json(load_json(a.psi))
        rep = lift.end_to_end_f2(phi, Psi, a.tau)
    else:
        rep = lift.end_to_end_f2(phi, None, a.tau)
    emit(rep.to_json())


def cmd_bracket(a):
    phase = nil.BracketPhase.from_json(load_json(a.phase))
    seq = nil.bracket_sequence(phase, a.range)
    emit({"N": a.range, "values": [[v.real, v.imag] for v in seq]})


def cmd_correlate(a):
    obj = load_json(a.f)
    f = DenseFn.from_json(obj)
    phase = nil.BracketPhase.from_json(load_json(a.phase))
    val = nil.correlate(f, phase)
    emit({"value": [val.real, val.imag], "magnitude": abs(val)})


def cmd_run(a):
    cfg = harness.RunConfig(a.suite, a.seed, a.instances, a.threads, a.tol, a.out, a.csv)
    t = time.perf_counter()
    report = harness.run_suite(cfg)
    if not a.out:
        sys.stdout.write(report.jsonl())
    print(f"{cfg.suite}: {report.summary['passed']}/{report.summary['instances']} passed "
          f"in {time.perf_counter() - t:.1f}s", file=sys.stderr)
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="addcomb", description="Additive combinatorics toolkit")
    p.add_argument("--version", action="version",
                   version=f"addcomb {harness.version()} build {harness.build_digest()}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("fft", help="Fourier transform of a dense function")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_fft)

    s = sub.add_parser("sieve-check", help="large sieve inequality for f(1..M)")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--thetas", required=True)
    s.add_argument("--delta", type=float)
    s.set_defaults(func=cmd_sieve)

    s = sub.add_parser("gowers", help="Gowers U^k norm")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--method", choices=["naive", "fast"], default="fast")
    s.set_defaults(func=cmd_gowers)

    s = sub.add_parser("freiman-check", help="Freiman homomorphism test")
    s.add_argument("--map", required=True)
    s.add_argument("--order", type=int, choices=[2, 3], default=2)
    s.set_defaults(func=cmd_freiman)

    s = sub.add_parser("dense-model", help="dense model of a subset of F_2^N")
    s.add_argument("--set", required=True)
    s.set_defaults(func=cmd_dense_model)

    s = sub.add_parser("approx-group", help="K-approximate group certificate")
    s.add_argument("--set", required=True)
    s.add_argument("--K", type=float, required=True)
    s.set_defaults(func=cmd_approx_group)

    s = sub.add_parser("bohr", help="Bohr set and its progression")
    s.add_argument("--M", type=int, required=True)
    s.add_argument("--freqs", required=True)
    s.add_argument("--radii", required=True)
    s.add_argument("--to-gap", action="store_true")
    s.set_defaults(func=cmd_bohr)

    s = sub.add_parser("sublevel", help="progression inside a sublevel set of an affine map")
    s.add_argument("--box", required=True, help="side lengths, e.g. 200x50")
    s.add_argument("--alpha", required=True)
    s.add_argument("--eps", default="0.1")
    s.add_argument("--zero", help="point where eta vanishes (default: box centre)")
    s.add_argument("--strict", action="store_true")
    s.set_defaults(func=cmd_sublevel)

    s = sub.add_parser("quad-split", help="mixed-derivative split of a quadratic on F_2^{n+N}")
    s.add_argument("--psi", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--N", type=int, required=True)
    s.set_defaults(func=cmd_quad_split)

    s = sub.add_parser("rank-line", help="common subspace for a low-rank family")
    s.add_argument("--family", required=True)
    s.add_argument("--set", required=True)
    s.add_argument("--r", type=int, required=True)
    s.set_defaults(func=cmd_rank_line)

    s = sub.add_parser("lift", help="lift a partial map to a bounded function")
    s.add_argument("--map", required=True)
    s.add_argument("--ambient", choices=["f2", "z"], default="f2")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("extract", help="recover an affine map from a quadratic correlate")
    s.add_argument("--map", required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--psi")
    g.add_argument("--search", action="store_true")
    s.add_argument("--tau", type=float)
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("bracket", help="bracket phase sequence on 0..N-1")
    s.add_argument("--phase", required=True)
    s.add_argument("--range", type=int, required=True)
    s.set_defaults(func=cmd_bracket)

    s = sub.add_parser("correlate", help="correlation of f on Z/NZ with a bracket phase")
    s.add_argument("--f", required=True)
    s.add_argument("--phase", required=True)
    s.set_defaults(func=cmd_correlate)

    s = sub.add_parser("run", help="run a seeded suite")
    s.add_argument("--suite", required=True, choices=sorted(harness.SUITES))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--instances", type=int)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--tol", type=float, default=harness.DEFAULT_TOL)
    s.add_argument("--out")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_run)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"addcomb: error: {exc}", file=sys.stderr)
        return 2
    return int(code or 0)


if __name__ == "__main__":
    sys.exit(main())
