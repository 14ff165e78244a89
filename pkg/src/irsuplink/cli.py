"""Command-line entry point: run, batch, validate, threshold-table."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import PHASE_MODES, ConfigError, SimConfig, apply_env_overrides, load_config_file
from .engine import BATCH_METRICS, BatchError, run_batch, run_simulation
from .report import AGGREGATE, aggregate_dict, render_text, write_bundle
from .sensing import exact_threshold, gaussian_threshold
from .validation import run_checks


def parse_seeds(text: str) -> list[int]:
    """``"1..4"`` (inclusive range), ``"1,5,9"`` or a single seed."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise argparse.ArgumentTypeError(f"empty seed range {part!r}")
            seeds.extend(range(lo, hi + 1))
        elif part:
            seeds.append(int(part))
    if not seeds:
        raise argparse.ArgumentTypeError("no seeds given")
    return seeds


def _seed_arg(text: str) -> list[int]:
    try:
        return parse_seeds(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _build_config(args) -> SimConfig:
    cfg = load_config_file(args.config) if args.config else SimConfig()
    cfg = apply_env_overrides(cfg)
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if args.slots is not None:
        changes["num_slots"] = args.slots
    if args.mode is not None:
        changes["phase_mode"] = args.mode
    return cfg.replace(**changes) if changes else cfg


def cmd_run(args) -> int:
    cfg = _build_config(args)
    result = run_simulation(cfg)
    if args.out:
        write_bundle(result, args.out)
    sys.stdout.write(render_text(result))
    return 0


def cmd_batch(args) -> int:
    cfg = _build_config(args)
    results, agg = run_batch(cfg, args.seeds, workers=args.workers)
    payload = aggregate_dict(agg, results)
    if args.out:
        out = Path(args.out)
        for r in results:
            write_bundle(r, out / f"seed_{r.config.seed}")
        (out / AGGREGATE).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"{len(results)} runs, seeds {', '.join(str(s) for s in agg.seeds)}")
    for m in BATCH_METRICS:
        print(f"{m:<22} {agg.mean[m]:.6g} +/- {agg.std[m]:.3g}")
    return 0


def cmd_validate(args) -> int:
    results = run_checks()
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return 0 if all(ok for _, ok, _ in results) else 1


def cmd_threshold_table(args) -> int:
    print(f"{'M':>6} {'P_fa':>8} {'exact/sigma2':>14} {'gauss/sigma2':>14} {'rel_gap':>10}")
    for m in args.samples:
        for pfa in args.pfa:
            ex = exact_threshold(1.0, m, pfa)
            ga = gaussian_threshold(1.0, m, pfa)
            print(f"{m:>6} {pfa:>8.4g} {ex:>14.6f} {ga:>14.6f} {(ga - ex) / ex:>10.2e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irsuplink", description="IRS-assisted mobile uplink simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="flat TOML config file")
        p.add_argument("--slots", type=int, help="override num_slots")
        p.add_argument("--mode", choices=PHASE_MODES, help="IRS phase mode")
        p.add_argument("--out", type=Path, help="output directory")

    run = sub.add_parser("run", help="one seeded run")
    common(run)
    run.add_argument("--seed", type=int, default=None, help="master seed (default: config value, 42)")
    run.set_defaults(func=cmd_run)

    batch = sub.add_parser("batch", help="independent runs over several seeds")
    common(batch)
    batch.add_argument("--seeds", type=_seed_arg, required=True, help='e.g. "1..4" or "1,5,9"')
    batch.add_argument("--workers", type=int, default=1)
    batch.set_defaults(func=cmd_batch)

    val = sub.add_parser("validate", help="fast numerical self-checks")
    val.set_defaults(func=cmd_validate)

    table = sub.add_parser("threshold-table", help="exact vs Gaussian energy-detection thresholds")
    table.add_argument("--samples", type=_int_list, default=[8, 16, 32, 64, 128, 256, 1024])
    table.add_argument("--pfa", type=_float_list, default=[0.1, 0.01])
    table.set_defaults(func=cmd_threshold_table)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, BatchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
