"""Command-line front end.

Subcommands:

* ``sweep``     assign states over a grid of average values (or one
                region / finite-N dataset) and emit the curve data as
                CSV or JSON;
* ``validate``  run the property-check suite and report margins;
* ``bench``     time the compiled weight kernels against the NumPy
                fallback.

Exit codes: 0 success, 2 configuration error, 3 integration or symmetry
failure, 4 I/O error.

Outputs are deterministic: a fixed configuration produces byte-identical
files regardless of the worker thread count.  The per-row ``elapsed_ms``
column is therefore left empty unless ``--timing`` is passed, as wall
times are the one quantity that cannot be reproducible.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional

import numpy as np

from . import bloch
from .assign import (
    AssignmentResult,
    assign_finite_n,
    assign_large_n,
    assign_large_n_region,
    mirror_assignment,
    prior_is_flip_invariant,
)
from .backend import available_backends, get_backend, set_backend
from .errors import (
    DegenerateSliceError,
    SymmetryViolationError,
    WeightUnderflowError,
)
from .integrate import IntegratorConfig, integrate_slice
from .maxent import maxent_state
from .priors import PriorSpec
from .validate import run_checks

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_IO = 4

CSV_COLUMNS = (
    "mbar",
    "x8",
    "x8_stderr",
    "x3",
    "maxent_x8",
    "n_samples",
    "n_physical",
    "mirrored",
    "analytic",
    "seed",
    "elapsed_ms",
)

#: adaptive stderr targets reproducing the figure-protocol uncertainty
#: levels when --target-stderr is not given
DEFAULT_TARGET_STDERR = {"constant": 0.01, "gaussian": 0.02, "slater": 0.02}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0.0:
        raise ValueError("grid step must be positive")
    if stop < start:
        raise ValueError("grid stop must be >= start")
    values = []
    k = 0
    while True:
        v = round(start + k * step, 12) + 0.0
        if v > stop + step * 1e-9:
            break
        values.append(v)
        k += 1
    if any(not -1.0 <= v <= 1.0 for v in values):
        raise ValueError("grid values must lie in [-1, 1]")
    return values


def _parse_center(text: str) -> np.ndarray:
    if text == "pure1":
        return bloch.pure_state_bloch(1)
    if text == "pure0":
        return bloch.pure_state_bloch(0)
    if text.startswith("custom:"):
        vals = [float(v) for v in text[len("custom:"):].split(",")]
        if len(vals) != 8:
            raise ValueError("custom center needs exactly 8 comma-separated floats")
        return np.asarray(vals)
    raise ValueError(
        f"center must be pure1, pure0 or custom:<8 floats>, got {text!r}"
    )


def _parse_region(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"region must be two comma-separated floats, got {text!r}")
    return float(parts[0]), float(parts[1])


def _build_prior(args) -> PriorSpec:
    if args.prior == "constant":
        return PriorSpec.constant()
    if args.prior == "slater":
        return PriorSpec.slater(k=args.slater_exponent)
    return PriorSpec.gaussian_like(_parse_center(args.center), args.s)


def _build_cfg(args, seed: int) -> IntegratorConfig:
    target = args.target_stderr
    if target is None and args.command == "sweep":
        target = DEFAULT_TARGET_STDERR[args.prior]
    if target == 0.0:
        # explicit 0 disables the adaptive stop
        target = None
    return IntegratorConfig(
        n_samples=args.samples,
        seed=seed,
        sequence=args.sequence,
        target_stderr=target,
        max_samples=args.max_samples,
        chunk_size=args.chunk_size,
    )


def _add_integrator_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--samples", type=int, default=1 << 17,
                   help="initial sample budget per integration (default 131072)")
    p.add_argument("--target-stderr", type=float, default=None,
                   help="adaptive stop once every component stderr is below "
                        "this; 0 disables; sweep default matches the "
                        "figure-protocol uncertainty per prior")
    p.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    p.add_argument("--sequence", choices=("pseudo", "lowdisc"), default="pseudo",
                   help="pseudo-random or scrambled low-discrepancy sampling")
    p.add_argument("--chunk-size", type=int, default=1 << 14,
                   help="samples per deterministic chunk (default 16384)")
    p.add_argument("--max-samples", type=int, default=1 << 26,
                   help="hard cap for the adaptive loop (default 67108864)")
    p.add_argument("--backend", choices=("cython", "python"), default=None,
                   help="force a weight-kernel backend (default: compiled if "
                        "available)")


def _add_prior_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--prior", choices=("constant", "gaussian", "slater"),
                   required=True, help="prior knowledge to condition on")
    p.add_argument("--center", default="pure1",
                   help="gaussian center: pure1, pure0 or custom:<8 floats> "
                        "(default pure1)")
    p.add_argument("--s", type=float, default=0.25,
                   help="gaussian breadth (default 0.25)")
    p.add_argument("--slater-exponent", type=int, default=7,
                   help="determinant power of the slater prior (default 7)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qutrit-assign",
        description="Bayesian posterior-mean qutrit state assignment from "
                    "average-value data, with a maximum-entropy comparison.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser(
        "sweep",
        help="assign states over an average-value grid and emit curve data",
    )
    _add_prior_args(sweep)
    _add_integrator_args(sweep)
    sweep.add_argument("--grid", default="0:1:0.1",
                       help="start:stop:step averages (default 0:1:0.1); an "
                            "all-nonnegative grid is expanded with mirrored "
                            "negative rows, a grid containing negatives is "
                            "used as given")
    sweep.add_argument("--region", default=None,
                       help="a,b closed interval of averages (region methods)")
    sweep.add_argument("--method",
                       choices=("large-n", "large-n-region", "finite-n"),
                       default="large-n")
    sweep.add_argument("--N", type=int, default=None,
                       help="number of measurement repetitions (finite-n)")
    sweep.add_argument("--compare-maxent", action="store_true",
                       help="add the maximum-entropy x8 column")
    sweep.add_argument("--no-mirror", action="store_true",
                       help="integrate negative averages directly instead of "
                            "mirroring the positive result")
    sweep.add_argument("--timing", action="store_true",
                       help="fill the elapsed_ms column (breaks byte-level "
                            "reproducibility)")
    sweep.add_argument("--output", default="-",
                       help="output path, '-' for stdout (default)")
    sweep.add_argument("--format", choices=("csv", "json"), default="csv")

    validate = sub.add_parser(
        "validate", help="run the property-check suite and report margins"
    )
    _add_prior_args(validate)
    _add_integrator_args(validate)
    validate.add_argument("--corrupt-basis", action="store_true",
                          help=argparse.SUPPRESS)

    bench = sub.add_parser(
        "bench", help="time the compiled weight kernels vs the NumPy fallback"
    )
    bench.add_argument("--samples", type=int, default=1 << 20,
                       help="points per kernel timing (default 1048576)")
    bench.add_argument("--repeat", type=int, default=5,
                       help="repetitions, best time reported (default 5)")
    bench.add_argument("--seed", type=int, default=0)
    return parser


def _row_from_result(
    res: AssignmentResult,
    row_seed: int,
    maxent_x8: Optional[float],
    elapsed_ms: Optional[float],
) -> dict:
    est = res.estimate
    return {
        "mbar": res.mbar,
        "x8": res.x8,
        "x8_stderr": res.x8_stderr,
        "x3": float(res.x[2]),
        "maxent_x8": maxent_x8,
        "n_samples": est.n_samples if est is not None else 0,
        "n_physical": est.n_physical if est is not None else 0,
        "mirrored": res.mirrored,
        "analytic": res.diagnostics is None,
        "seed": row_seed,
        "elapsed_ms": elapsed_ms,
    }


def _sweep_grid_rows(args, prior: PriorSpec) -> list[dict]:
    requested = _parse_grid(args.grid)
    if not requested:
        raise ValueError("grid produced no values")
    if all(v >= 0.0 for v in requested):
        values = sorted({v for v in requested} | {-v + 0.0 for v in requested})
    else:
        values = sorted(set(requested))
    abs_order = sorted({abs(v) for v in values})
    seed_of = {a: args.seed + i for i, a in enumerate(abs_order)}
    mirror_ok = not args.no_mirror and prior_is_flip_invariant(prior)

    results: dict[float, AssignmentResult] = {}
    timings: dict[float, float] = {}
    # positives first so that negatives can reuse them through the swap
    for v in sorted(values, key=lambda t: (abs(t), t < 0.0)):
        t0 = time.perf_counter()
        if v < 0.0 and mirror_ok and -v in results:
            res = mirror_assignment(results[-v])
        else:
            res = assign_large_n(
                v,
                prior,
                _build_cfg(args, seed_of[abs(v)]),
                mirror_negative=mirror_ok,
                backend=args.backend,
            )
        timings[v] = (time.perf_counter() - t0) * 1e3
        results[v] = res

    rows = []
    for v in values:
        res = results[v]
        rows.append(
            _row_from_result(
                res,
                row_seed=seed_of[abs(v)],
                maxent_x8=maxent_state(v).x8 if args.compare_maxent else None,
                elapsed_ms=round(timings[v], 3) if args.timing else None,
            )
        )
    return rows


def _sweep_single_row(args, prior: PriorSpec) -> list[dict]:
    if args.region is None:
        raise ValueError(f"--method {args.method} requires --region")
    region = _parse_region(args.region)
    cfg = _build_cfg(args, args.seed)
    t0 = time.perf_counter()
    if args.method == "large-n-region":
        res = assign_large_n_region(region, prior, cfg, backend=args.backend)
    else:
        if args.N is None or args.N < 1:
            raise ValueError("--method finite-n requires --N >= 1")
        res = assign_finite_n(region, args.N, prior, cfg, backend=args.backend)
    elapsed = (time.perf_counter() - t0) * 1e3
    maxent_x8 = None
    if args.compare_maxent and res.mbar is not None:
        maxent_x8 = maxent_state(res.mbar).x8
    return [
        _row_from_result(
            res,
            row_seed=args.seed,
            maxent_x8=maxent_x8,
            elapsed_ms=round(elapsed, 3) if args.timing else None,
        )
    ]


def _write_csv(rows: list[dict], stream) -> None:
    stream.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(row[c]) for c in CSV_COLUMNS) + "\n")


def _config_echo(args) -> dict:
    echo = {
        "command": args.command,
        "prior": args.prior,
        "method": args.method,
        "grid": args.grid if args.method == "large-n" else None,
        "region": args.region,
        "N": args.N,
        "samples": args.samples,
        "target_stderr": args.target_stderr,
        "seed": args.seed,
        "sequence": args.sequence,
        "chunk_size": args.chunk_size,
        "max_samples": args.max_samples,
        "compare_maxent": args.compare_maxent,
        "mirror": not args.no_mirror,
        "timing": args.timing,
        "format": args.format,
        "backend": args.backend,
    }
    if args.prior == "gaussian":
        echo["center"] = args.center
        echo["s"] = args.s
    if args.prior == "slater":
        echo["slater_exponent"] = args.slater_exponent
    return echo


def _write_output(args, rows: list[dict]) -> None:
    if args.format == "csv":
        payload_writer = lambda stream: _write_csv(rows, stream)
    else:
        doc = {"schema_version": 1, "config": _config_echo(args), "rows": rows}
        payload_writer = lambda stream: stream.write(
            json.dumps(doc, indent=2, sort_keys=True) + "\n"
        )
    if args.output == "-":
        payload_writer(sys.stdout)
    else:
        with open(args.output, "w", newline="") as fh:
            payload_writer(fh)


def _cmd_sweep(args) -> int:
    prior = _build_prior(args)
    if args.method == "large-n":
        rows = _sweep_grid_rows(args, prior)
    else:
        rows = _sweep_single_row(args, prior)
    _write_output(args, rows)
    return EXIT_OK


def _cmd_validate(args) -> int:
    prior = _build_prior(args)
    cfg = _build_cfg(args, args.seed)
    if args.backend is not None:
        set_backend(args.backend)
    try:
        checks = run_checks(prior, cfg, corrupt_swap=args.corrupt_basis)
    finally:
        if args.backend is not None:
            set_backend(None)
    failed = 0
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"[{status}] {c.name}: margin={c.margin:.3e} gate={c.gate:g} "
              f"({c.detail})")
        failed += 0 if c.passed else 1
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    if failed:
        raise SymmetryViolationError(f"{failed} validation check(s) failed")
    return EXIT_OK


def _cmd_bench(args) -> int:
    rng = np.random.default_rng(args.seed)
    pts = np.ascontiguousarray(
        bloch.BOX_LOW + rng.random((args.samples, 8)) * (bloch.BOX_HIGH - bloch.BOX_LOW)
    )
    center = bloch.pure_state_bloch(1)
    kernels = {
        "constant": lambda mod: mod.weights_constant(pts),
        "gaussian": lambda mod: mod.weights_gaussian(pts, center, 8.0, 0.0),
        "slater": lambda mod: mod.weights_slater(pts, 7),
    }
    names = available_backends()
    if "cython" not in names:
        print("compiled backend unavailable; timing the NumPy fallback only")
    print(f"weight-kernel timings, {args.samples} points, best of {args.repeat}:")
    best: dict[tuple[str, str], float] = {}
    for kname, call in kernels.items():
        parts = []
        for bname in names:
            mod = get_backend(bname)
            t = min(
                _timed(call, mod) for _ in range(args.repeat)
            )
            best[kname, bname] = t
            parts.append(f"{bname} {t * 1e3:8.2f} ms")
        line = f"  {kname:9s} " + " | ".join(parts)
        if "cython" in names and "python" in names:
            line += f"  ({best[kname, 'python'] / best[kname, 'cython']:.1f}x)"
        print(line)

    print("end-to-end integrate_slice(mbar=0.5, constant prior, 2^17 samples):")
    for bname in names:
        cfg = IntegratorConfig(n_samples=1 << 17, seed=args.seed)
        t = min(
            _timed(lambda m: integrate_slice(0.5, PriorSpec.constant(), cfg,
                                             backend=bname), None)
            for _ in range(args.repeat)
        )
        print(f"  {bname:9s} {t * 1e3:8.2f} ms")
    return EXIT_OK


def _timed(call, arg) -> float:
    t0 = time.perf_counter()
    call(arg)
    return time.perf_counter() - t0


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_bench(args)
    except (DegenerateSliceError, WeightUnderflowError, SymmetryViolationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
