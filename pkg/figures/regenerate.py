#!/usr/bin/env python3
"""Regenerate every preset plot from the committed sample CSVs.

The sample CSVs under sample_data/ are small-drop runs of the simulator's
fig1..fig8 presets (see sample_data/README.txt for the exact commands).
Output images land in figures/output/.
"""

from __future__ import annotations

import sys
from pathlib import Path

from plotting import PlotSpec, SchemaError, render

HERE = Path(__file__).resolve().parent
DATA = HERE / "sample_data"
OUT = HERE / "output"

PRESET_PLOTS = [
    PlotSpec(
        csv_path=str(DATA / "fig1.csv"),
        x="snr_db", y="sum_rate_raw", output=str(OUT / "fig1.png"),
        title="Sum rate vs SNR (M=16, K=20, iid)",
        x_label="SNR [dB]", y_label="sum rate [bits/s/Hz]",
    ),
    PlotSpec(
        csv_path=str(DATA / "fig2.csv"),
        x="k", y="sum_rate_raw", output=str(OUT / "fig2.png"),
        title="Sum rate vs K (M=4, 10 dB)",
        x_label="number of users K", y_label="sum rate [bits/s/Hz]",
    ),
    PlotSpec(
        csv_path=str(DATA / "fig3.csv"),
        x="k", y="sum_rate_raw", output=str(OUT / "fig3.png"),
        title="Sum rate vs K (M=8, 10 dB)",
        x_label="number of users K", y_label="sum rate [bits/s/Hz]",
    ),
    PlotSpec(
        csv_path=str(DATA / "fig4.csv"),
        x="k", y="sum_rate_raw", output=str(OUT / "fig4.png"),
        title="Sum rate vs K (M=16, 10 dB)",
        x_label="number of users K", y_label="sum rate [bits/s/Hz]",
    ),
    *[
        PlotSpec(
            csv_path=str(DATA / "fig5.csv"),
            x="k", y="sum_rate_raw",
            filters={"spread_lo_deg": lo},
            output=str(OUT / f"fig5_spread_{lo}_{hi}.png"),
            title=f"Sum rate vs K (M=8, spread [{lo},{hi}] deg)",
            x_label="number of users K", y_label="sum rate [bits/s/Hz]",
        )
        for lo, hi in (("5.0", "10"), ("10.0", "20"), ("20.0", "40"))
    ],
    *[
        PlotSpec(
            csv_path=str(DATA / "fig6.csv"),
            x="k", y="sum_rate_raw",
            filters={"err_var": err},
            output=str(OUT / f"fig6_err_{err}.png"),
            title=f"Sum rate vs K (M=16, CSIT error variance {err})",
            x_label="number of users K", y_label="sum rate [bits/s/Hz]",
        )
        for err in ("0.1", "0.2")
    ],
    PlotSpec(
        csv_path=str(DATA / "fig7.csv"),
        x="k", y="sum_rate_adjusted", output=str(OUT / "fig7.png"),
        title="Pilot-adjusted throughput vs K (M=16, error 0.1)",
        x_label="number of users K", y_label="adjusted throughput [bits/s/Hz]",
    ),
    PlotSpec(
        csv_path=str(DATA / "fig8.csv"),
        x="k", y="sum_rate_raw", output=str(OUT / "fig8.png"),
        title="One-bit vs partial INR (M=16, heterogeneous SNR)",
        x_label="number of users K", y_label="sum rate [bits/s/Hz]",
    ),
]


def main() -> int:
    OUT.mkdir(exist_ok=True)
    failures = 0
    for spec in PRESET_PLOTS:
        try:
            path = render(spec)
            print(f"wrote {path}")
        except (SchemaError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
