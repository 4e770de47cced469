"""Command line interface.

    switchcav run <scenario.toml | preset> [--out PATH]
    switchcav sweep <scenario.toml | preset> --axis NAME --values v1,v2,... [--out-dir DIR]
    switchcav presets
    switchcav validate <scenario.toml>
"""
from __future__ import annotations

import argparse
import copy
import os
import sys
from pathlib import Path

from .scenario import (
    ScenarioError,
    list_presets,
    parse_scenario,
    preset_text,
    run_scenario,
    scenario_from_dict,
    sweep,
    write_csv,
)


def _load(source: str, rtol: float | None = None, atol: float | None = None,
          method: str | None = None):
    path = Path(source)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    elif source in list_presets():
        text = preset_text(source)
    else:
        raise ScenarioError(f"{source!r} is neither a scenario file nor a preset "
                            f"({', '.join(list_presets())})")
    s = parse_scenario(text)
    if rtol is None and atol is None and method is None:
        return s
    doc = copy.deepcopy(s.document)
    if rtol is not None:
        doc["grid"]["rtol"] = rtol
    if atol is not None:
        doc["grid"]["atol"] = atol
    if method is not None:
        doc["method"] = method
    return scenario_from_dict(doc)


def _parse_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _add_numeric_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rtol", type=float, help="relative tolerance of the numeric path")
    p.add_argument("--atol", type=float, help="absolute tolerance of the numeric path")
    p.add_argument("--method", choices=("auto", "analytic", "numeric"),
                   help="force the closed-form or the ODE path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="switchcav",
        description="Emission dynamics of two-level emitters in a switched microcavity.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and write CSV")
    p_run.add_argument("scenario", help="scenario TOML file or preset name")
    p_run.add_argument("--out", help="output CSV (default: [output] path, else stdout)")
    _add_numeric_flags(p_run)

    p_sweep = sub.add_parser("sweep", help="run a scenario for several values of one parameter")
    p_sweep.add_argument("scenario", help="scenario TOML file or preset name")
    p_sweep.add_argument("--axis", required=True, help="parameter, e.g. switch.tau_sw or dgamma")
    p_sweep.add_argument("--values", required=True, type=_parse_values,
                         help="comma-separated values")
    p_sweep.add_argument("--out-dir", default=".", help="directory for the CSV files")
    p_sweep.add_argument("--workers", type=int, default=1, help="parallel processes")
    _add_numeric_flags(p_sweep)

    sub.add_parser("presets", help="list bundled presets")

    p_val = sub.add_parser("validate", help="check a scenario file without running it")
    p_val.add_argument("file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            for name in list_presets():
                s = parse_scenario(preset_text(name))
                print(f"{name:<18} {s.description}")
        elif args.command == "validate":
            path = Path(args.file)
            if not path.is_file():
                raise ScenarioError(f"no such file: {args.file}")
            s = parse_scenario(path.read_text(encoding="utf-8"))
            print(f"ok: {s.name} ({s.digest[:12]})")
        elif args.command == "run":
            s = _load(args.scenario, args.rtol, args.atol, args.method)
            ts = run_scenario(s)
            out = args.out or s.path
            if out:
                write_csv(ts, out)
                print(f"wrote {out}", file=sys.stderr)
            else:
                write_csv(ts, sys.stdout)
        elif args.command == "sweep":
            s = _load(args.scenario, args.rtol, args.atol, args.method)
            results = sweep(s, args.axis, args.values, workers=args.workers)
            out_dir = Path(args.out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            tag = args.axis.replace(".", "_")
            for i, (value, ts) in enumerate(zip(args.values, results)):
                ts.metadata["sweep_axis"] = args.axis
                ts.metadata["sweep_value"] = repr(value)
                path = out_dir / f"{s.name}_{tag}_{i:03d}.csv"
                write_csv(ts, path)
                print(path)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return 0
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
