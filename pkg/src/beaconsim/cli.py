"""Command line entry point: ``beaconsim run`` and ``beaconsim compare``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys

from .config import load_config
from .errors import ConfigError
from .metrics import compare_runs, format_comparison, format_metrics_csv, write_metrics_csv
from .sim import PROTOCOLS, SimConfig, Simulation, write_analysis_csv, write_trace_csv

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="beaconsim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate one protocol arm and write per-epoch metrics")
    r.add_argument("--protocol", choices=PROTOCOLS)
    r.add_argument("--config", help="flat section.key = value file")
    r.add_argument("--seed", type=int)
    r.add_argument("--duration-s", type=float)
    r.add_argument("--out", help="metrics CSV path (stdout when omitted)")
    r.add_argument("--trace", help="optional per-reception trace CSV")
    r.add_argument("--analysis", help="optional per-vehicle channel analysis CSV")

    c = sub.add_parser("compare", help="compare two metrics CSVs (ratios are b/a)")
    c.add_argument("csv_a")
    c.add_argument("csv_b")
    return p


def _run(args) -> int:
    try:
        cfg = load_config(args.config) if args.config else SimConfig()
        overrides = {
            "protocol": args.protocol,
            "seed": args.seed,
            "duration_s": args.duration_s,
            "metrics_out": args.out,
            "trace_out": args.trace,
            "analysis_out": args.analysis,
        }
        cfg = dataclasses.replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    except OSError as e:
        print(f"beaconsim: cannot read config: {e}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as e:
        print(f"beaconsim: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    sim = Simulation(cfg)
    rows = sim.run()
    try:
        if cfg.metrics_out:
            write_metrics_csv(rows, cfg.metrics_out)
        else:
            sys.stdout.write(format_metrics_csv(rows))
        if cfg.trace_out:
            write_trace_csv(sim, cfg.trace_out)
        if cfg.analysis_out:
            write_analysis_csv(sim, cfg.analysis_out)
    except OSError as e:
        print(f"beaconsim: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _compare(args) -> int:
    try:
        summary = compare_runs(args.csv_a, args.csv_b)
    except OSError as e:
        print(f"beaconsim: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"beaconsim: {e}", file=sys.stderr)
        return EXIT_CONFIG
    print(format_comparison(summary, os.path.basename(args.csv_a), os.path.basename(args.csv_b)))
    return EXIT_OK


def main(argv=None) -> int:
    level = os.environ.get("BEACONSIM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _run(args)
    return _compare(args)


if __name__ == "__main__":
    sys.exit(main())
