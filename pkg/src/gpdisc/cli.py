"""Command line: gpdisc <mode> --config PATH [--out DIR] [--threads N] [--seed N] [--format csv,json,svg]."""
import argparse
import os
import sys

from .config import MODES, parse_config
from .errors import GPDiscError, IoError, ParseError, ValidationError
from .outputs import FORMATS, emit_outputs
from .runner import run_experiment, validate_record

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def build_parser():
    ap = argparse.ArgumentParser(prog="gpdisc", description="Rotating condensate in the unit disc.")
    sub = ap.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        sp = sub.add_parser(mode)
        sp.add_argument("--config", required=True, help="configuration file")
        sp.add_argument("--out", help="output directory (overrides the config)")
        sp.add_argument("--threads", type=int, help="worker threads for sweeps (default GPDISC_THREADS or 1)")
        sp.add_argument("--seed", type=int, help="random seed (overrides the config)")
        sp.add_argument("--format", default="csv,json", help="comma-separated subset of csv,json,svg")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as err:
            raise IoError(args.config, str(err)) from err
        cfg = parse_config(text)
        if cfg.mode != args.mode:
            raise ValidationError("mode", f"config says {cfg.mode!r}, command is {args.mode!r}")
        if args.out:
            cfg.out = args.out
        if args.seed is not None:
            cfg.seed = args.seed
        threads = args.threads if args.threads is not None else os.environ.get("GPDISC_THREADS")
        if threads is not None:
            try:
                cfg.threads = int(threads)
            except ValueError:
                raise ValidationError("threads", f"not an integer: {threads!r}")
            if cfg.threads < 1:
                raise ValidationError("threads", "must be positive")
        formats = {f.strip() for f in args.format.split(",") if f.strip()}
        if not formats <= set(FORMATS):
            raise ValidationError("format", f"unknown format(s) {sorted(formats - set(FORMATS))}")
    except (ParseError, ValidationError, IoError) as err:
        print(f"gpdisc: configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rec = run_experiment(cfg)
    except GPDiscError as err:
        rec = getattr(err, "record", None)
        if rec is not None:
            try:
                emit_outputs(rec, {"csv", "json"}, cfg.out)
            except GPDiscError:
                pass
        print(f"gpdisc: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    try:
        emit_outputs(rec, formats, cfg.out)
        validate_record(rec)
    except GPDiscError as err:
        print(f"gpdisc: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"gpdisc {cfg.mode}: ok ({rec.wall_clock:.1f} s) -> {cfg.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
