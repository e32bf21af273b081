"""Render sweep-result CSVs as static comparison plots.

Input is the simulator's run CSV (comment line, header, per-drop rows).  Rows
are aggregated to mean +/- standard error per (series, x) before plotting.
Output is deterministic: fixed style, no timestamps, metadata stripped.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

MARKERS = ("o", "s", "^", "v", "D", "x", "*", "+")

SCHEME_LABELS = {
    "zfbf_sus": "ZFBF-SUS",
    "full_inr": "full INR",
    "partial_inr": "partial INR",
    "dft_sinr": "DFT-SINR",
    "rbf": "RBF",
    "one_bit_inr": "one-bit INR",
}


class SchemaError(ValueError):
    """A required column is missing from the CSV header."""


@dataclass(frozen=True)
class PlotSpec:
    csv_path: str
    x: str = "k"
    y: str = "sum_rate_raw"
    group: str = "scheme"
    error_bars: bool = True
    output: str = "plot.png"
    title: str = ""
    x_label: str = ""
    y_label: str = ""
    # Optional row filter, e.g. {"err_var": "0.1"}; values compared as strings.
    filters: dict = field(default_factory=dict)


def load_rows(csv_path: str, required: tuple[str, ...]) -> list[dict]:
    """Read data rows, skipping comment lines; verify required columns."""
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        header = reader.fieldnames or []
        missing = [col for col in required if col not in header]
        if missing:
            raise SchemaError(
                f"{csv_path}: missing required column(s) {', '.join(missing)}"
            )
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{csv_path}: no data rows")
    return rows


def _series(rows, spec: PlotSpec):
    """Aggregate to {group: (x values, means, standard errors)}."""
    buckets: dict[tuple[str, float], list[float]] = {}
    for row in rows:
        if any(row[k] != v for k, v in spec.filters.items()):
            continue
        key = (row[spec.group], float(row[spec.x]))
        buckets.setdefault(key, []).append(float(row[spec.y]))
    if not buckets:
        raise SchemaError(f"{spec.csv_path}: filters {spec.filters} match no rows")
    out = {}
    for group in sorted({g for g, _ in buckets}):
        xs = sorted(x for g, x in buckets if g == group)
        means, ses = [], []
        for x in xs:
            vals = np.array(buckets[(group, x)])
            means.append(float(vals.mean()))
            ses.append(float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0)
        out[group] = (xs, means, ses)
    return out


def render(spec: PlotSpec) -> str:
    """Render one plot; returns the output path."""
    required = tuple(dict.fromkeys((spec.x, spec.y, spec.group, *spec.filters)))
    rows = load_rows(spec.csv_path, required)
    series = _series(rows, spec)

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for i, (group, (xs, means, ses)) in enumerate(series.items()):
        label = SCHEME_LABELS.get(group, group)
        marker = MARKERS[i % len(MARKERS)]
        if spec.error_bars and any(se > 0 for se in ses):
            ax.errorbar(xs, means, yerr=ses, marker=marker, capsize=3, label=label)
        else:
            ax.plot(xs, means, marker=marker, label=label)
    ax.set_xlabel(spec.x_label or spec.x)
    ax.set_ylabel(spec.y_label or spec.y)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.output, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return spec.output
