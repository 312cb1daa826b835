"""Command-line front end.

Four subcommands: ``table`` (modulus values with cross-check residuals),
``verify`` (appendix, sharpness, and witness scans as pass/fail report
lines), ``envelope`` (slice reconstruction CSV with certificate and
brute-force columns), and ``bruteforce`` (a single search probe).

Exit codes: 0 success, 1 a mathematical verification failed, 2 usage error.
Floats are printed with shortest round-trip repr, so identical command
lines (including seeds) produce byte-identical output.  The environment
variable UCX_THREADS caps the thread pool used for grid queries; all
outputs are ordered by input grid order regardless of schedule.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from typing import IO

from . import bellman, certificates, envelope
from .domain import BoundaryFace, LambdaPoint, contains
from .errors import UcxError
from .moduli import delta, delta_implicit


class UsageError(Exception):
    pass


def _workers() -> int:
    raw = os.environ.get("UCX_THREADS", "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError as e:
            raise UsageError(f"UCX_THREADS must be an integer, got {raw!r}") from e
        if n < 1:
            raise UsageError(f"UCX_THREADS must be positive, got {n}")
        return n
    return os.cpu_count() or 1


def _ordered_map(fn, items):
    n = _workers()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _parse_eps_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise UsageError(f"eps grid must be 'lo:hi:n' or a single value, got {text!r}")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 1:
        raise UsageError(f"eps grid needs at least one point, got n={n}")
    if n == 1:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def _check_common(p: float, eps_values: list[float]) -> None:
    if not p > 1.0:
        raise UsageError(f"p must exceed 1, got {p}")
    for e in eps_values:
        if not (0.0 <= e <= 2.0):
            raise UsageError(f"eps must lie in [0, 2], got {e}")


def _open_output(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _emit_rows(rows: list[dict], fields: list[str], fmt: str, out: IO[str]) -> None:
    if fmt == "json":
        out.write(json.dumps(rows) + "\n")
        return
    out.write(",".join(fields) + "\n")
    for row in rows:
        out.write(",".join(repr(row[f]) if isinstance(row[f], float) else str(row[f]) for f in fields) + "\n")


def cmd_table(args) -> int:
    eps_values = _parse_eps_grid(args.eps)
    _check_common(args.p, eps_values)
    p = args.p
    rows = []
    for e in eps_values:
        d = delta(p, e)
        if p > 2.0:
            route, residual = "closed_form", 0.0
        elif p == 2.0:
            route, residual = "closed_form", abs(d - delta_implicit(p, e))
        else:
            route = "s_star"
            residual = abs(d - delta_implicit(p, e))
        rows.append(
            {"p": p, "eps": e, "delta": d, "route": route, "cross_check_residual": residual}
        )
    out, close = _open_output(args.output)
    try:
        _emit_rows(rows, ["p", "eps", "delta", "route", "cross_check_residual"], args.format, out)
    finally:
        if close:
            out.close()
    return 0


def cmd_verify(args) -> int:
    eps = args.eps
    if args.p < 2.0 and eps is None:
        raise UsageError("epsilon required for p<2")
    _check_common(args.p, [] if eps is None else [eps])
    if eps is not None and eps == 0.0:
        raise UsageError("eps must be positive for verification scans")
    reports = certificates.verify_appendix(args.p, eps, args.grid_n, args.s_max)
    if args.p < 2.0:
        reports.append(certificates.sharpness_check(args.p, eps, n_chord=args.n_chord))
    else:
        e = eps if eps is not None else 1.0
        near = certificates.sharpness_check(args.p, e, args.s_probe, args.n_chord)
        far = certificates.sharpness_check(args.p, e, args.s_probe * 1000.0, args.n_chord)
        shrinks = certificates.VerificationReport(
            "chord-gap-shrinks",
            args.n_chord,
            far.worst_value - near.worst_value,
            args.s_probe * 1000.0,
            bool(args.p == 2.0 or far.worst_value < near.worst_value),
        )
        reports.extend([near, far, shrinks])
    if args.trials > 0 and eps is not None:
        reports.append(bellman.witness_test(args.p, eps, args.trials, args.seed))
    out, close = _open_output(args.output)
    try:
        for r in reports:
            out.write(r.line() + "\n")
    finally:
        if close:
            out.close()
    return 0 if all(r.passed for r in reports) else 1


def _auto_radius(p: float, eps: float | None) -> float:
    if p < 2.0:
        return 8.0 * max(1.0, 2.0 * eps ** (-p))
    # keeps the slice anchors and every (1, 1, x3) query strictly inside the hull
    return 8.0 * max(1.0, 2.0**p)


def cmd_envelope(args) -> int:
    _check_common(args.p, [] if args.eps is None else [args.eps])
    p = args.p
    if p < 2.0:
        if args.eps is None:
            raise UsageError("epsilon required for p<2")
        if args.eps == 0.0:
            raise UsageError("eps must be positive for the p<2 certificate")
        cert = certificates.certificate_lt2(p, args.eps)
    else:
        cert = certificates.certificate_ge2(p)
    if args.grid_n < 2:
        raise UsageError(f"grid-n must be at least 2, got {args.grid_n}")
    radius = args.radius if args.radius is not None else _auto_radius(p, args.eps)
    grid = envelope.sample_boundary(p, 0.5, args.n_per_face, radius)
    budget = bellman.SearchBudget(args.restarts, args.local_steps, args.seed, args.penalty)
    x3s = [i * (2.0**p) / (args.grid_n - 1) for i in range(args.grid_n)]

    def row(x3: float) -> dict:
        point = LambdaPoint(1.0, 1.0, x3)
        env = envelope.concavify(grid, point).result
        bf = bellman.brute_force_bellman(point, p, 0.5, budget).value
        return {
            "x3": x3,
            "envelope": env,
            "certificate": cert.value(point),
            "brute_force": bf,
        }

    rows = _ordered_map(row, x3s)
    violations = [
        r for r in rows
        if not (r["brute_force"] - args.sandwich_tol <= r["envelope"] <= r["certificate"] + 1e-9)
    ]
    out, close = _open_output(args.output)
    try:
        _emit_rows(rows, ["x3", "envelope", "certificate", "brute_force"], args.format, out)
    finally:
        if close:
            out.close()
    for r in violations:
        print(f"ucx: sandwich violation at x3={r['x3']!r}: "
              f"brute_force={r['brute_force']!r} envelope={r['envelope']!r} "
              f"certificate={r['certificate']!r}", file=sys.stderr)
    return 1 if violations else 0


def cmd_bruteforce(args) -> int:
    parts = args.x.split(",")
    if len(parts) != 3:
        raise UsageError(f"--x wants 'x1,x2,x3', got {args.x!r}")
    try:
        coords = [float(v) for v in parts]
    except ValueError as e:
        raise UsageError(f"malformed point {args.x!r}") from e
    if min(coords) < 0.0:
        raise UsageError(f"moment coordinates must be nonnegative, got {args.x!r}")
    if not args.p > 1.0:
        raise UsageError(f"p must exceed 1, got {args.p}")
    x = LambdaPoint(*coords)
    if contains(x, args.p) is BoundaryFace.OUTSIDE:
        print(f"ucx: point {args.x} lies outside the cone", file=sys.stderr)
        return 1
    budget = bellman.SearchBudget(args.restarts, args.local_steps, args.seed, args.penalty)
    result = bellman.brute_force_bellman(x, args.p, args.theta, budget)
    out, close = _open_output(args.output)
    try:
        out.write(bellman.format_witness(x, args.p, args.theta, result) + "\n")
    finally:
        if close:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ucx",
        description="Sharp modulus of uniform convexity of L^p with numerical certification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("table", help="modulus values over an eps grid")
    t.add_argument("--p", type=float, required=True)
    t.add_argument("--eps", type=str, required=True, help="single value or lo:hi:n grid")
    t.add_argument("--format", choices=["csv", "json"], default="csv")
    t.add_argument("--output", default="-")
    t.set_defaults(fn=cmd_table)

    v = sub.add_parser("verify", help="appendix, sharpness, and witness verification")
    v.add_argument("--p", type=float, required=True)
    v.add_argument("--eps", type=float, default=None)
    v.add_argument("--grid-n", type=int, default=10001, dest="grid_n")
    v.add_argument("--s-max", type=float, default=100.0, dest="s_max")
    v.add_argument("--s-probe", type=float, default=1e3, dest="s_probe")
    v.add_argument("--n-chord", type=int, default=1001, dest="n_chord")
    v.add_argument("--trials", type=int, default=0, help="witness trials (0 skips)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--output", default="-")
    v.set_defaults(fn=cmd_verify)

    e = sub.add_parser("envelope", help="slice reconstruction with sandwich check")
    e.add_argument("--p", type=float, required=True)
    e.add_argument("--eps", type=float, default=None)
    e.add_argument("--grid-n", type=int, default=50, dest="grid_n")
    e.add_argument("--n-per-face", type=int, default=24, dest="n_per_face")
    e.add_argument("--radius", type=float, default=None)
    e.add_argument("--restarts", type=int, default=24)
    e.add_argument("--local-steps", type=int, default=600, dest="local_steps")
    e.add_argument("--penalty", type=float, default=1e4)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--sandwich-tol", type=float, default=2.5e-2, dest="sandwich_tol")
    e.add_argument("--format", choices=["csv", "json"], default="csv")
    e.add_argument("--output", default="-")
    e.set_defaults(fn=cmd_envelope)

    b = sub.add_parser("bruteforce", help="search probe at one moment point")
    b.add_argument("--p", type=float, required=True)
    b.add_argument("--x", type=str, required=True, help="x1,x2,x3")
    b.add_argument("--theta", type=float, default=0.5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--restarts", type=int, default=200)
    b.add_argument("--local-steps", type=int, default=2000, dest="local_steps")
    b.add_argument("--penalty", type=float, default=1e4)
    b.add_argument("--output", default="-")
    b.set_defaults(fn=cmd_bruteforce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse already printed the diagnostic
        return int(e.code or 0)
    try:
        return args.fn(args)
    except UsageError as e:
        print(f"ucx: {e}", file=sys.stderr)
        return 2
    except UcxError as e:
        print(f"ucx: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
