"""Command-line front end: generate walks, analyze them, run Monte Carlo, verify.

Exit codes: 0 success, 1 a verified property or tolerance check failed,
2 usage or I/O error.  Trajectories travel as CSV (`n,x1[,x2,...]`), analysis
reports as JSON lines, experiment reports as a single JSON document.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, TextIO

import numpy as np

from .analysis import analyze_stream, arith_checkpoints, dyadic_checkpoints
from .core import WalkStream, walk_from_path
from .experiments import METRICS, TrialSpec, compare, run_trials
from .generators import make_walk
from .suites import run_suite


class CsvFormatError(ValueError):
    """A trajectory CSV failed to parse; the message carries the line number."""


# ---------------------------------------------------------------------------
# Trajectory CSV
# ---------------------------------------------------------------------------


def write_trajectory_csv(stream: WalkStream, horizon: int, fh: TextIO) -> None:
    """Write x_0..x_horizon as `n,x1[,...]` rows with LF endings."""
    d = stream.d
    fh.write("n," + ",".join(f"x{i + 1}" for i in range(d)) + "\n")
    n = 0
    for block in stream.blocks(horizon):
        rows = block.tolist()
        if d == 1:
            fh.write("".join(f"{n + i},{x}\n" for i, x in enumerate(rows)))
        else:
            fh.write(
                "".join(
                    f"{n + i}," + ",".join(str(c) for c in row) + "\n"
                    for i, row in enumerate(rows)
                )
            )
        n += len(rows)


def read_trajectory_csv(fh: TextIO) -> np.ndarray:
    """Parse a trajectory CSV; malformed rows report their line number."""
    header = fh.readline()
    if not header:
        raise CsvFormatError("line 1: empty file, expected header n,x1[,...]")
    cols = header.strip().split(",")
    if len(cols) < 2 or cols[0] != "n" or cols[1:] != [f"x{i + 1}" for i in range(len(cols) - 1)]:
        raise CsvFormatError(f"line 1: bad header {header.strip()!r}, expected n,x1[,...]")
    d = len(cols) - 1
    rows = []
    expected_n = 0
    for lineno, raw in enumerate(fh, start=2):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != d + 1:
            raise CsvFormatError(
                f"line {lineno}: expected {d + 1} fields, got {len(parts)}"
            )
        try:
            values = [int(v) for v in parts]
        except ValueError:
            raise CsvFormatError(f"line {lineno}: non-integer field in {line!r}")
        if values[0] != expected_n:
            raise CsvFormatError(
                f"line {lineno}: step index {values[0]}, expected {expected_n}"
            )
        expected_n += 1
        rows.append(values[1:])
    if not rows:
        raise CsvFormatError("line 2: no data rows")
    arr = np.asarray(rows, dtype=np.int64)
    return arr[:, 0] if d == 1 else arr


# ---------------------------------------------------------------------------
# Flag handling
# ---------------------------------------------------------------------------


def _add_generator_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument(
        "--gen",
        choices=["srw", "ergodic", "birth-death", "zigzag", "tau-tent", "spiral2d", "linear-drift"],
        help="walk generator",
    )
    sp.add_argument("--p", type=float, help="up-step probability for srw")
    sp.add_argument("--ell", type=float, help="target limsup speed for zigzag, in (0,1)")
    sp.add_argument(
        "--preset",
        help="birth-death preset (symmetric|lazy:<a>|reflected) or ergodic chain "
        "(switch:<a>,<b>|iid:<p>)",
    )
    sp.add_argument("--pattern", help="comma-separated steps for linear-drift")
    sp.add_argument("--tau-rule", dest="tau_rule", help="squares or geometric:<c>")
    sp.add_argument("--m", type=int, help="declared increment bound")
    sp.add_argument("--seed", type=int, help="64-bit seed")


def _build_config(args, require_seed: bool = True) -> dict:
    """Flat generator-config record from flags, with flag-named validation."""
    gen = args.gen
    if gen is None:
        raise ValueError("--gen is required")
    steps = args.steps
    if steps is None or steps < 1:
        raise ValueError("--steps must be >= 1")
    if require_seed and gen in ("srw", "ergodic", "birth-death") and args.seed is None:
        raise ValueError(f"--seed is required for --gen {gen}")
    cfg = {"gen": gen, "steps": int(steps)}
    if gen == "srw":
        if args.p is None or not (0.0 <= args.p <= 1.0):
            raise ValueError("--p must lie in [0, 1]")
        cfg["p"] = args.p
    elif gen == "zigzag":
        if args.ell is None or not (0.0 < args.ell < 1.0):
            raise ValueError("--ell must lie in (0, 1)")
        cfg["ell"] = args.ell
    elif gen in ("ergodic", "birth-death"):
        if not args.preset:
            raise ValueError(f"--preset is required for --gen {gen}")
        cfg["preset"] = args.preset
    elif gen == "tau-tent":
        if not args.tau_rule:
            raise ValueError("--tau-rule is required for --gen tau-tent")
        cfg["tau_rule"] = args.tau_rule
    elif gen == "linear-drift":
        if not args.pattern:
            raise ValueError("--pattern is required for --gen linear-drift")
        cfg["pattern"] = [int(v) for v in args.pattern.split(",")]
        cfg["m"] = args.m if args.m is not None else max(abs(v) for v in cfg["pattern"])
    if args.seed is not None:
        cfg["seed"] = args.seed
    return cfg


def _parse_checkpoints(spec: Optional[str], horizon: int) -> np.ndarray:
    if spec is None or spec == "dyadic":
        return dyadic_checkpoints(horizon)
    if spec.startswith("arith:"):
        return arith_checkpoints(horizon, int(spec.split(":", 1)[1]))
    raise ValueError("--checkpoints must be dyadic or arith:<k>")


def _open_out(path: Optional[str]):
    if path is None:
        return sys.stdout, False
    return open(path, "w", newline="\n"), True


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    cfg = _build_config(args)
    stream = make_walk(cfg)
    fh, close = _open_out(args.out)
    try:
        write_trajectory_csv(stream, cfg["steps"], fh)
    finally:
        if close:
            fh.close()
    return 0


def cmd_analyze(args) -> int:
    if args.infile is None and args.gen is None:
        raise ValueError("analyze needs --in or an inline --gen configuration")
    if args.infile is not None:
        with open(args.infile, "r") as fh:
            arr = read_trajectory_csv(fh)
        horizon = arr.shape[0] - 1
        if args.gen is not None:
            if args.steps is None:
                args.steps = horizon
            cfg = _build_config(args)
            meta = make_walk(cfg).metadata
            if args.m is not None and args.m != meta.m:
                raise ValueError(f"--m {args.m} conflicts with the generator's m={meta.m}")
            stream = walk_from_path(arr, metadata=meta)
        else:
            stream = walk_from_path(arr, m=args.m, name="csv")
    else:
        cfg = _build_config(args)
        stream = make_walk(cfg)
        horizon = cfg["steps"]
        if args.m is not None and args.m != stream.m:
            raise ValueError(f"--m {args.m} conflicts with the generator's m={stream.m}")
    checkpoints = _parse_checkpoints(args.checkpoints, horizon)
    report = analyze_stream(stream, horizon, checkpoints=checkpoints)
    fh, close = _open_out(args.out)
    try:
        if args.plot_data:
            for row in report.rows:
                n = row["n"]
                for series in ("x_over_n", "M_over_n", "r_over_n"):
                    fh.write(f"{n}\t{row[series]}\t{series}\n")
        else:
            for line in report.jsonl_lines():
                fh.write(line + "\n")
    finally:
        if close:
            fh.close()
    return 0


def cmd_mc(args) -> int:
    if args.seed is None:
        raise ValueError("--seed is required for mc")
    master = args.seed
    args.seed = None  # the master seed is not part of the generator config
    cfg = _build_config(args, require_seed=False)
    metrics = tuple(args.metric.split(",")) if args.metric else ("range_speed", "walk_speed")
    for name in metrics:
        if name not in METRICS:
            raise ValueError(f"--metric {name!r} unknown; choose from {METRICS}")
    spec = TrialSpec(
        config=cfg,
        horizon=cfg["steps"],
        metrics=metrics,
        trials=args.trials if args.trials is not None else 1,
        master_seed=master,
    )
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    report = run_trials(spec, workers=workers)
    doc = report.to_json_doc()
    failed = False
    has_theory = any(agg.theory is not None for agg in report.per_metric.values())
    if has_theory:
        verdicts = compare(report, args.tol)
        doc["tol"] = args.tol
        doc["verdicts"] = verdicts
        failed = not all(v["pass"] for v in verdicts.values())
    text = json.dumps(doc, indent=2)
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text + "\n")
    if args.json or not args.out:
        print(text)
    if not args.json:
        for name, agg in report.per_metric.items():
            line = f"{name}: mean={agg.mean:.6g} stddev={agg.stddev:.6g} ci95={agg.ci95:.6g}"
            if agg.theory is not None:
                line += f" theory={agg.theory:.6g} delta={agg.delta:.6g}"
            print(line, file=sys.stderr)
        if has_theory:
            for name, v in doc["verdicts"].items():
                print(
                    f"{'PASS' if v['pass'] else 'FAIL'} {name} (delta {v['delta']:.6g}, tol {args.tol})",
                    file=sys.stderr,
                )
    return 1 if failed else 0


def cmd_verify(args) -> int:
    results = run_suite(
        args.suite,
        paths=args.paths,
        length=args.len,
        m_values=args.m,
        seed=args.seed,
        trials=args.trials,
        steps=args.steps,
    )
    ok = True
    for res in results:
        ok &= res.passed
        print(f"{'PASS' if res.passed else 'FAIL'}: {res.name} ({res.detail})")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# Parser and entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rangewalk",
        description="Integer-lattice walks, range statistics, and verification runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a trajectory CSV")
    _add_generator_flags(g)
    g.add_argument("--steps", type=int, help="horizon (number of steps)")
    g.add_argument("--out", help="output CSV path (default stdout)")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", help="analyze a CSV or an inline generator run")
    _add_generator_flags(a)
    a.add_argument("--in", dest="infile", help="trajectory CSV to read")
    a.add_argument("--steps", type=int, help="horizon for inline generation")
    a.add_argument("--checkpoints", help="dyadic (default) or arith:<k>")
    a.add_argument("--out", help="output path (default stdout)")
    a.add_argument(
        "--plot-data",
        action="store_true",
        help="emit plot-ready TSV (n, value, series) instead of JSONL",
    )
    a.set_defaults(func=cmd_analyze)

    m = sub.add_parser("mc", help="run Monte Carlo trials and compare to theory")
    _add_generator_flags(m)
    m.add_argument("--steps", type=int, help="horizon per trial")
    m.add_argument("--trials", type=int, help="number of independent trials")
    m.add_argument("--metric", help="comma list from " + ",".join(METRICS))
    m.add_argument("--tol", type=float, default=0.02, help="theory tolerance (default 0.02)")
    m.add_argument("--workers", type=int, help="thread-pool width (default: all cores)")
    m.add_argument("--out", help="write the JSON report here")
    m.add_argument("--json", action="store_true", help="print the JSON report to stdout")
    m.set_defaults(func=cmd_mc)

    v = sub.add_parser("verify", help="run a named verification suite")
    v.add_argument(
        "--suite",
        required=True,
        choices=[
            "maximal-range",
            "sandwich",
            "excursion",
            "zigzag-exact",
            "spiral-distinct",
            "oracle-range",
        ],
    )
    v.add_argument("--paths", type=int, help="number of random paths")
    v.add_argument("--len", type=int, help="length of each random path")
    v.add_argument("--m", type=int, help="increment bound for random paths")
    v.add_argument("--seed", type=int, help="suite seed")
    v.add_argument("--trials", type=int, help="Monte Carlo trials (oracle-range)")
    v.add_argument("--steps", type=int, help="horizon for generator-based suites")
    v.set_defaults(func=cmd_verify)
    return parser


def run_command(argv=None) -> int:
    """Parse argv and dispatch; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
