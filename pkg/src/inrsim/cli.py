"""Command-line entry point: run sweeps, emit presets, evaluate scaling formulas."""

from __future__ import annotations

import argparse
import sys

from inrsim import analysis, harness
from inrsim.errors import ConfigurationError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inrsim",
        description="Monte Carlo simulator for limited-feedback MU-MIMO downlink scheduling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a sweep from a config file")
    p_run.add_argument("config", help="flat key=value config file")
    p_run.add_argument("--output", help="override the config's output CSV path")
    p_run.add_argument("--drops", type=int, help="override the config's drop count")
    p_run.add_argument("--progress", action="store_true", help="print progress")

    p_preset = sub.add_parser("preset", help="emit a figure-style preset config")
    p_preset.add_argument("name", choices=harness.preset_names())
    p_preset.add_argument("--write", help="write the config to this path instead of stdout")

    p_an = sub.add_parser("analyze", help="emit asymptotic-throughput tables as CSV")
    p_an.add_argument("--m", type=int, required=True)
    p_an.add_argument("--t", type=int, default=2)
    p_an.add_argument("--k", required=True, help="comma-separated user counts")
    p_an.add_argument("--power", type=float, default=10.0, help="total transmit SNR, linear")
    p_an.add_argument("--base", type=float, default=None, help="log base (default natural)")
    p_an.add_argument("--output", required=True, help="output CSV path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = harness.load_config(args.config)
            if args.output:
                cfg = _with(cfg, output=args.output)
            if args.drops:
                cfg = _with(cfg, drops=args.drops)
            record = harness.run_sweep(cfg, progress=args.progress)
            _print_summary(record)
        elif args.command == "preset":
            cfg = harness.preset(args.name)
            text = harness.config_to_text(cfg)
            if args.write:
                with open(args.write, "w") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
        elif args.command == "analyze":
            k_values = [int(x) for x in args.k.split(",")]
            analysis.write_scaling_csv(args.output, args.m, k_values, args.t, args.power, args.base)
            print(f"wrote {args.output}")
    except (ConfigurationError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def _with(cfg, **kw):
    from dataclasses import replace

    return replace(cfg, **kw)


def _print_summary(record) -> None:
    print(f"config_hash={record.config.config_hash()} rows={len(record.rows)}")
    for key in sorted(record.aggregates):
        agg = record.aggregates[key]
        scheme, k, snr, err, lo, hi = key
        tag = f"{scheme} K={k} SNR={snr}dB err={err}"
        if lo != "":
            tag += f" spread=[{lo},{hi}]deg"
        print(
            f"  {tag}: raw {agg['mean_raw']:.3f} +/- {agg['se_raw']:.3f}, "
            f"adjusted {agg['mean_adjusted']:.3f} +/- {agg['se_adjusted']:.3f}"
        )
    if record.config.output:
        print(f"wrote {record.config.output}")


if __name__ == "__main__":
    sys.exit(main())
