"""Command line front end.

Exit codes: 0 success, 2 validation or parse failure, 3 engines disagree
beyond tolerance, 4 hopeless instance.  ``GAL_LOG`` sets the log level
(e.g. ``GAL_LOG=debug``).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from . import experiments
from .errors import GalError, HopelessInstance, ToleranceExceeded
from .io import SWEEP_COLUMNS, TRAJECTORY_COLUMNS, dump_json, load_instance, load_sweep, write_csv

log = logging.getLogger("gal")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, help="write output here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--seed", type=int, help="override the seed in the input file")

    parser = argparse.ArgumentParser(
        prog="gal",
        description="Grover search with arbitrary initial amplitudes: closed-form "
                    "predictions cross-checked against a state-vector simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", parents=[common], help="closed-form trajectory and summary")
    p.add_argument("instance", type=Path)
    p.add_argument("--t-max", type=int)

    p = sub.add_parser("simulate", parents=[common], help="state-vector trajectory")
    p.add_argument("instance", type=Path)
    p.add_argument("--t-max", type=int)
    p.add_argument("--method", choices=("direct", "wht"))

    p = sub.add_parser("compare", parents=[common], help="run both engines and diff them")
    p.add_argument("instance", type=Path)
    p.add_argument("--t-max", type=int)
    p.add_argument("--method", choices=("direct", "wht"))
    p.add_argument("--tolerance", type=float)
    p.add_argument("--perturb-omega", type=float, default=0.0, help=argparse.SUPPRESS)

    p = sub.add_parser("sweep", parents=[common], help="noise-robustness sweep")
    p.add_argument("sweep_spec", type=Path)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("plan", parents=[common], help="measurement schedule")
    p.add_argument("instance", type=Path)
    p.add_argument("--two-time", action="store_true",
                   help="schedule for unknown initial moments (needs only N and r)")
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _emit_record(record: experiments.RunRecord, fmt: str | None, out: Path | None) -> None:
    if fmt == "csv":
        _emit(write_csv(TRAJECTORY_COLUMNS, record.rows), out)
    else:
        _emit(dump_json(record.to_json()), out)


def _instance(args):
    inst = load_instance(args.instance)
    if args.seed is not None:
        inst = dataclasses.replace(inst, init=dataclasses.replace(inst.init, seed=args.seed))
    return inst


def run(args) -> int:
    cmd = args.command
    if cmd == "predict":
        _emit_record(experiments.predict(_instance(args), args.t_max), args.format, args.out)
    elif cmd == "simulate":
        _emit_record(experiments.simulate(_instance(args), args.t_max, args.method), args.format, args.out)
    elif cmd == "compare":
        record = experiments.compare(_instance(args), args.t_max, args.tolerance, args.method,
                                     omega_perturbation=args.perturb_omega, raise_on_failure=False)
        _emit_record(record, args.format, args.out)
        if not record.summary["passed"]:
            raise ToleranceExceeded(
                f"max |dP|={record.summary['max_p_divergence']:.3e}, "
                f"max |da|={record.summary['max_amplitude_divergence']:.3e} "
                f"exceed tolerance {record.summary['tolerance']:.1e}")
    elif cmd == "sweep":
        spec = load_sweep(args.sweep_spec)
        if args.seed is not None:
            spec = dataclasses.replace(spec, base_seed=args.seed)
        rows = experiments.sweep(spec, jobs=args.jobs)
        if args.format == "json":
            data = [dict(zip(SWEEP_COLUMNS, (experiments._json_cell(v) for v in row))) for row in rows]
            _emit(dump_json(data), args.out)
        else:
            _emit(write_csv(SWEEP_COLUMNS, rows), args.out)
    elif cmd == "plan":
        result = experiments.plan(_instance(args), two_time=args.two_time)
        _emit(dump_json(result), args.out)
        if result.get("strategy") == "Hopeless":
            raise HopelessInstance(f"regime {result['regime']}: success probability is constant")
    return 0


def main(argv=None) -> int:
    level = os.environ.get("GAL_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    args = _parser().parse_args(argv)
    try:
        return run(args)
    except GalError as exc:
        print(f"gal {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"gal {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
