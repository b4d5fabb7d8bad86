"""Command-line entry point: ``qgtprobe {sweep,chern,point,nonabelian,validate}``."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from qgtprobe.circuit import DEFAULT_SHOTS
from qgtprobe.ite import DEFAULT_TAU
from qgtprobe.model import GammaModelPoint, GaplessError
from qgtprobe.nonabelian import GaugeError, nonabelian_qgt, oracle_nonabelian_qgt
from qgtprobe.qgt import DEFAULT_DELTA, DEFAULT_GRID_N, DEFAULT_ROBUST_EPS
from qgtprobe.sweep import CSV_COLUMNS, METHODS, RunConfig, SweepResult, chern, compute_point, evaluate_point, sweep
from qgtprobe.validation import DEFAULT_DELTAS, validate

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _add_run_flags(p: argparse.ArgumentParser, shots_default: int | None = DEFAULT_SHOTS) -> None:
    p.add_argument("--method", choices=METHODS, default="vqa")
    p.add_argument("--m", type=float, default=1.25, help="mass parameter")
    p.add_argument("--grid-n", type=int, default=DEFAULT_GRID_N)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="finite-difference step (rad)")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU, help="imaginary time")
    p.add_argument("--shots", type=int, default=shots_default)
    p.add_argument("--exact", action="store_true", help="exact outcome distributions instead of shots")
    p.add_argument("--depolarizing", type=float, default=0.0, metavar="P")
    p.add_argument("--readout-q", type=float, default=0.0, metavar="Q")
    p.add_argument("--mitigate", action="store_true", help="invert the readout confusion matrix")
    p.add_argument("--no-purify", action="store_true", help="keep the raw (unnormalized) Bloch vector")
    p.add_argument("--robust-eps", type=float, default=DEFAULT_ROBUST_EPS)
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None, help="output directory (records.csv, manifest.json)")


def config_from_args(args) -> RunConfig:
    return RunConfig(
        method=args.method,
        m=args.m,
        grid_n=args.grid_n,
        delta=args.delta,
        tau=args.tau,
        shots=None if args.exact or args.shots is None else args.shots,
        depolarizing_p=args.depolarizing,
        readout_q=args.readout_q,
        mitigate=args.mitigate,
        purify=not args.no_purify,
        robust_eps=args.robust_eps,
        base_seed=args.seed,
        workers=args.workers,
    )


def _print_records(records) -> None:
    print(",".join(CSV_COLUMNS))
    for r in records:
        print(",".join(r.row()))


def cmd_sweep(args) -> int:
    result = sweep(config_from_args(args))
    if args.out:
        csv_path, man_path = result.write(args.out)
        print(f"wrote {csv_path} and {man_path}")
    else:
        _print_records(result.records)
    bad = result.flagged()
    print(f"{len(result.records)} points, {len(bad)} flagged, {result.manifest['wall_time_s']:.2f} s", file=sys.stderr)
    return EXIT_OK


def cmd_chern(args) -> int:
    if args.input:
        result = SweepResult.read(args.input)
    else:
        result = sweep(config_from_args(args))
        if args.out:
            result.write(args.out)
    try:
        report = chern(result, skip_nonfinite=args.skip_nonfinite)
    except ValueError as exc:
        print(f"error: {exc} (use --skip-nonfinite to integrate the remaining points)", file=sys.stderr)
        return EXIT_FAIL
    print(report)
    return EXIT_OK


def cmd_point(args) -> int:
    cfg = config_from_args(args)
    if args.index is not None:
        rec = compute_point(cfg, args.index)
    elif args.kx is not None and args.ky is not None:
        rec = evaluate_point(cfg, args.kx, args.ky, cfg.base_seed)
    else:
        print("error: give --index or both --kx and --ky", file=sys.stderr)
        return EXIT_CONFIG
    _print_records([rec])
    return EXIT_OK


def _fmt_block(name, blk) -> str:
    rows = ["  ".join(f"{z.real:+.10f}{z.imag:+.10f}j" for z in row) for row in np.asarray(blk)]
    return f"{name}:\n    " + "\n    ".join(rows)


def cmd_nonabelian(args) -> int:
    q = GammaModelPoint(args.kmu, args.knu, args.m)
    try:
        res = nonabelian_qgt(q, args.delta, robust_eps=args.robust_eps)
        ref = oracle_nonabelian_qgt(q, args.delta) if args.oracle else None
    except (GaugeError, GaplessError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.json:
        enc = lambda d: {f"{a},{b}": [[[z.real, z.imag] for z in row] for row in v] for (a, b), v in d.items()}
        print(json.dumps({"g": enc(res.g), "F": enc(res.F), "flags": list(res.flags)}, indent=2))
    else:
        for key in res.g:
            print(_fmt_block(f"g[{key[0]},{key[1]}]", res.g[key]))
            print(_fmt_block(f"F[{key[0]},{key[1]}]", res.F[key]))
    if ref is not None:
        err = max(
            max(float(np.max(np.abs(res.g[k] - ref.g[k]))) for k in res.g),
            max(float(np.max(np.abs(res.F[k] - ref.F[k]))) for k in res.F),
        )
        print(f"max |projector route - eigenvector oracle| = {err:.3e}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = config_from_args(args)
    report = validate(cfg, deltas=tuple(args.deltas))
    print(report)
    if args.verbose:
        for s in report.suites:
            for d in s.degraded:
                print(f"  {s.name}: {d}")
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgtprobe", description="Quantum geometric tensor sweeps and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="evaluate g and F on the momentum grid")
    _add_run_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("chern", help="Chern number of a new or saved sweep")
    _add_run_flags(p)
    p.add_argument("--input", default=None, help="directory written by 'sweep --out'")
    p.add_argument("--skip-nonfinite", action="store_true", help="integrate over finite points only")
    p.set_defaults(func=cmd_chern)

    p = sub.add_parser("point", help="one momentum point")
    _add_run_flags(p)
    p.add_argument("--index", type=int, default=None, help="grid index i*n + j, same seed as in a sweep")
    p.add_argument("--kx", type=float, default=None)
    p.add_argument("--ky", type=float, default=None)
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("nonabelian", help="non-Abelian tensor of the four-band model")
    p.add_argument("--kmu", type=float, required=True)
    p.add_argument("--knu", type=float, required=True)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1e-4)
    p.add_argument("--robust-eps", type=float, default=DEFAULT_ROBUST_EPS)
    p.add_argument("--oracle", action="store_true", help="also compare with the eigenvector oracle")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_nonabelian)

    p = sub.add_parser("validate", help="oracle-equivalence suites")
    # exact unless --shots is given
    _add_run_flags(p, shots_default=None)
    p.add_argument("--deltas", type=float, nargs="+", default=list(DEFAULT_DELTAS))
    p.add_argument("-v", "--verbose", action="store_true", help="list degraded points")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, IndexError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
