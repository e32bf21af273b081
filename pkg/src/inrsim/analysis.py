"""Closed-form asymptotic throughput expressions and the optimal-size predictor.

Random beamforming scales as M loglog K + M log(P/M) for large K; flexible
INR scheduling scales as max_s [ s loglog(K_eff * C(M-1, s-1)) + s log(P/s) ]
where K_eff is K (single subset), K*T (full feedback), or K/T (partial
feedback, users split evenly across subsets).  The log base is configurable
(natural log by default) and applies to both log levels; trend comparisons
against Monte Carlo use the argmax over s under one fixed convention, which
becomes insensitive to the base as K grows (the nested log shifts the
objective by an s-linear constant that vanishes relative to loglog K).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

VARIANTS = ("T1", "full", "partial")


@dataclass(frozen=True)
class ScalingPrediction:
    """Per-size objective values, the maximizing size, and its throughput."""

    variant: str
    objectives: tuple[float, ...]  # index s-1 holds the size-s objective
    best_s: int
    predicted_throughput: float


def _log(x: float, base: float | None) -> float:
    return math.log(x) if base is None else math.log(x, base)


def rbf_scaling(m: int, k: int, power: float, base: float | None = None) -> float:
    """M loglog K + M log(P/M), the o(1) term dropped (asymptotic)."""
    if m < 1 or power <= 0:
        raise ValueError("need m >= 1 and power > 0")
    if k <= math.e:
        raise ValueError("loglog K needs K > e")
    return m * _log(_log(k, base), base) + m * _log(power / m, base)


def inr_scaling(
    m: int,
    k: int,
    t_count: int,
    power: float,
    variant: str = "T1",
    base: float | None = None,
) -> ScalingPrediction:
    """Flexible-scheduling throughput objective for every size s, with argmax.

    Binomial coefficients are exact integers; ties in the argmax go to the
    smaller s.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if m < 1 or t_count < 1 or power <= 0:
        raise ValueError("need m, t >= 1 and power > 0")
    if variant == "T1":
        k_eff = float(k)
    elif variant == "full":
        k_eff = float(k * t_count)
    else:
        k_eff = k / t_count
    if k_eff <= math.e:
        raise ValueError(f"effective user count {k_eff} must exceed e")
    objectives = []
    for s in range(1, m + 1):
        pool = k_eff * math.comb(m - 1, s - 1)
        objectives.append(s * _log(_log(pool, base), base) + s * _log(power / s, base))
    best_s = 1 + max(range(m), key=lambda i: (objectives[i], -i))
    return ScalingPrediction(
        variant=variant,
        objectives=tuple(objectives),
        best_s=best_s,
        predicted_throughput=objectives[best_s - 1],
    )


@dataclass(frozen=True)
class LimitConsistencyReport:
    """Gap between INR and RBF predictions over a growing user grid."""

    k_grid: tuple[int, ...]
    gaps: tuple[float, ...]
    best_s_at_largest_k: int
    best_s_reached_m: bool


def limit_consistency_check(
    m: int, power: float, k_grid, t_count: int = 1, variant: str = "T1", base: float | None = None
) -> LimitConsistencyReport:
    """Check that the flexible-scheduling gain closes as K grows.

    Returns the sequence of prediction gaps (INR - RBF) over the grid and
    whether the maximizing size has reached M at the largest K.
    """
    k_grid = tuple(sorted(k_grid))
    gaps = []
    best_s = 1
    for k in k_grid:
        pred = inr_scaling(m, k, t_count, power, variant, base)
        gaps.append(pred.predicted_throughput - rbf_scaling(m, k, power, base))
        best_s = pred.best_s
    return LimitConsistencyReport(
        k_grid=k_grid,
        gaps=tuple(gaps),
        best_s_at_largest_k=best_s,
        best_s_reached_m=(best_s == m),
    )


def write_scaling_csv(path, m: int, k_values, t_count: int, power: float, base: float | None = None):
    """Emit rows (M, K, T, P, variant, s, objective, is_argmax) for all variants."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "k", "t", "power", "variant", "s", "objective", "is_argmax"])
        for k in k_values:
            for variant in VARIANTS:
                pred = inr_scaling(m, k, t_count, power, variant, base)
                for s, obj in enumerate(pred.objectives, start=1):
                    writer.writerow(
                        [m, k, t_count, power, variant, s, repr(obj), int(s == pred.best_s)]
                    )
