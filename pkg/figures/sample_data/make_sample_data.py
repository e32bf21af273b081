#!/usr/bin/env python3
"""Regenerate the committed sample CSVs: fig1..fig8 presets at 20 drops.

The full presets use 1000 drops per grid point; 20 keeps the committed files
small while exercising every column of the schema.  Run from anywhere:

    python figures/sample_data/make_sample_data.py
"""

from dataclasses import replace
from pathlib import Path

from inrsim import harness

HERE = Path(__file__).resolve().parent
DROPS = 20


def main() -> None:
    for name in harness.preset_names():
        cfg = replace(harness.preset(name), drops=DROPS, output=str(HERE / f"{name}.csv"))
        harness.run_sweep(cfg)
        print(f"wrote {cfg.output}")


if __name__ == "__main__":
    main()
