"""Command line front end: ``latticeborell <experiment> --config cfg.json``."""

from __future__ import annotations

import argparse
import sys

from .harness import EXPERIMENTS, ExperimentConfig, emit_report, report_lines, run_experiment


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="latticeborell",
        description="Lattice-point statistics and inequality experiments on convex bodies.",
    )
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", required=True, help="JSON experiment config")
    ap.add_argument("--seed", type=int, default=None, help="override config seed")
    ap.add_argument("--out", default=None, help="override report path")
    ap.add_argument("--threads", type=int, default=None,
                    help="worker threads (never changes results)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = ExperimentConfig.from_json_file(args.config)
    if cfg.experiment != args.experiment:
        print(f"config is for {cfg.experiment!r}, not {args.experiment!r}",
              file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    if args.threads is not None:
        cfg.threads = args.threads

    rows, ok = run_experiment(cfg)
    if cfg.out:
        emit_report(rows, cfg.fmt, cfg.out)
        print(f"wrote {len(rows)} rows to {cfg.out}")
    else:
        sys.stdout.write(report_lines(rows))
    print(f"checks: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
