"""Experiment orchestration: configs, seeded sweeps, presets, CSV persistence.

A sweep runs ``drops`` Monte Carlo drops at every grid point (the cartesian
product of the K grid, SNR grid, CSIT-error grid, and angular-spread
scenarios).  Within a drop the channel realization is shared by all schemes,
so scheme comparisons are paired; every stochastic stage draws from a
substream keyed by (base_seed, grid index, drop index, stage), never by
scheme order, so adding a scheme leaves other schemes' rows unchanged.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from inrsim import channel as ch
from inrsim import feedback as fb
from inrsim import metrics as mt
from inrsim import scheduler as sc
from inrsim.codebook import build_dft_codebook, build_random_unitary
from inrsim.errors import ConfigurationError

SCHEMES = ("zfbf_sus", "full_inr", "partial_inr", "dft_sinr", "rbf", "one_bit_inr")

CSV_COLUMNS = [
    "drop",
    "m",
    "t",
    "k",
    "snr_db",
    "err_var",
    "fading",
    "spread_lo_deg",
    "spread_hi_deg",
    "scheme",
    "s",
    "subset_t",
    "users",
    "beams",
    "kappa",
    "predicted_rate",
    "sum_rate_raw",
    "sum_rate_adjusted",
    "sum_rate_outage",
]

# Substream tags so stages cannot collide.
_STAGE_GEOMETRY = 0
_STAGE_CHANNEL = 1
_STAGE_CSIT = 2
_STAGE_RBF = 3
_STAGE_SNR = 4


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep definition. Angles are degrees here (converted internally)."""

    m: int = 4
    t: int = 2
    k_grid: tuple[int, ...] = (8,)
    snr_db_grid: tuple[float, ...] = (10.0,)
    err_var_grid: tuple[float, ...] = (0.0,)
    drops: int = 1000
    fading: str = "iid"  # iid | one_ring
    azimuth_range_deg: tuple[float, float] = (-60.0, 60.0)
    spread_scenarios_deg: tuple[tuple[float, float], ...] = ((5.0, 20.0),)
    antenna_spacing: float = 0.5
    redraw_geometry: bool = True  # redraw user geometry every drop
    schemes: tuple[str, ...] = ("partial_inr",)
    full_inr_mode: str = "greedy"
    quantizer_bits: int | None = None  # None = exact CQI values
    quantizer_db_range: tuple[float, float] = (-20.0, 25.0)
    gamma_threshold: float = 0.01
    eps_sus: float = 0.3
    overhead_use_grouping: bool = False
    pilot_threshold_db: float = -20.0
    outage_mode: bool = False
    hetero_snr: bool = False
    hetero_snr_db_range: tuple[float, float] = (0.0, 20.0)
    base_seed: int = 12345
    workers: int = 1
    output: str | None = None

    def __post_init__(self):
        if self.drops < 1:
            raise ConfigurationError("drops must be >= 1")
        if not self.k_grid or not self.snr_db_grid or not self.err_var_grid:
            raise ConfigurationError("grids must be non-empty")
        if not self.schemes:
            raise ConfigurationError("schemes must be non-empty")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigurationError(f"unknown scheme {s!r} (choose from {SCHEMES})")
        if self.fading not in ("iid", "one_ring"):
            raise ConfigurationError("fading must be 'iid' or 'one_ring'")
        if self.fading == "one_ring" and not self.spread_scenarios_deg:
            raise ConfigurationError("one_ring fading needs spread scenarios")

    def grid_points(self) -> list["GridPoint"]:
        scenarios = self.spread_scenarios_deg if self.fading == "one_ring" else ((None, None),)
        points = []
        for spread in scenarios:
            for k in self.k_grid:
                for snr in self.snr_db_grid:
                    for err in self.err_var_grid:
                        points.append(GridPoint(k=k, snr_db=snr, err_var=err, spread_deg=spread))
        return points

    def config_hash(self) -> str:
        blob = repr(sorted((f.name, repr(getattr(self, f.name))) for f in fields(self) if f.name != "output"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class GridPoint:
    k: int
    snr_db: float
    err_var: float
    spread_deg: tuple[float | None, float | None]


@dataclass(frozen=True)
class RunRecord:
    """All per-drop rows of a sweep plus per-(scheme, grid point) aggregates."""

    config: ExperimentConfig
    rows: tuple[dict, ...]
    aggregates: dict = field(default_factory=dict)

    def aggregate_key(self, row: dict):
        return (
            row["scheme"],
            row["k"],
            row["snr_db"],
            row["err_var"],
            row["spread_lo_deg"],
            row["spread_hi_deg"],
        )


def compute_aggregates(rows) -> dict:
    """Mean and standard error of raw/adjusted rates per (scheme, grid point)."""
    buckets: dict[tuple, list[dict]] = {}
    for row in rows:
        key = (
            row["scheme"],
            row["k"],
            row["snr_db"],
            row["err_var"],
            row["spread_lo_deg"],
            row["spread_hi_deg"],
        )
        buckets.setdefault(key, []).append(row)
    out = {}
    for key, group in buckets.items():
        raw = np.array([r["sum_rate_raw"] for r in group], dtype=float)
        adj = np.array([r["sum_rate_adjusted"] for r in group], dtype=float)
        n = len(group)
        out[key] = {
            "count": n,
            "mean_raw": float(raw.mean()),
            "se_raw": float(raw.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
            "mean_adjusted": float(adj.mean()),
            "se_adjusted": float(adj.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
        }
    return out


def _substream(cfg: ExperimentConfig, grid_index: int, drop: int, stage: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([cfg.base_seed, grid_index, drop, stage])
    )


def _drop_channel(cfg: ExperimentConfig, point: GridPoint, grid_index: int, drop: int):
    """Geometry + fading + CSIT noise for one drop (shared by all schemes)."""
    geo_drop = drop if cfg.redraw_geometry else 0
    geo_rng = _substream(cfg, grid_index, geo_drop, _STAGE_GEOMETRY)
    snr_scale = 1.0
    if cfg.hetero_snr:
        snr_rng = _substream(cfg, grid_index, geo_drop, _STAGE_SNR)
        snr_scale = ch.draw_heterogeneous_snr(point.k, snr_rng, cfg.hetero_snr_db_range)
    correlations = None
    if cfg.fading == "one_ring":
        lo, hi = point.spread_deg
        geometries = ch.drop_users(
            point.k,
            (math.radians(cfg.azimuth_range_deg[0]), math.radians(cfg.azimuth_range_deg[1])),
            (math.radians(lo), math.radians(hi)),
            geo_rng,
            snr_linear=snr_scale,
        )
        correlations = [
            ch.one_ring_correlation(g, cfg.m, cfg.antenna_spacing) for g in geometries
        ]
        noise = np.array([g.noise_power for g in geometries])
    else:
        noise = 1.0 / np.broadcast_to(np.asarray(snr_scale, dtype=float), (point.k,))
    realization = ch.gen_channel(
        cfg.m, point.k, _substream(cfg, grid_index, drop, _STAGE_CHANNEL), correlations, noise
    )
    return ch.add_csit_noise(
        realization, point.err_var, _substream(cfg, grid_index, drop, _STAGE_CSIT)
    )


def _schedule(cfg: ExperimentConfig, scheme: str, realization, codebook, power, grid_index, drop):
    h = realization.csit
    sigma2 = realization.noise_power
    quant = lambda rep: fb.quantize_cqi(rep, cfg.quantizer_bits, cfg.quantizer_db_range)
    reports = None
    if scheme == "zfbf_sus":
        decision = sc.schedule_zfbf_sus(realization, power, cfg.eps_sus)
    elif scheme == "rbf":
        beams = build_random_unitary(cfg.m, _substream(cfg, grid_index, drop, _STAGE_RBF))
        decision = sc.schedule_rbf(realization, beams, power)
    elif scheme == "dft_sinr":
        reports = {
            k: quant(fb.compute_sinr_report(h[:, k], sigma2[k], codebook, power))
            for k in range(realization.num_users)
        }
        decision = sc.schedule_dft_sinr(reports, codebook, power)
    elif scheme == "partial_inr":
        reports = {
            k: quant(fb.compute_partial_inr(h[:, k], sigma2[k], codebook))
            for k in range(realization.num_users)
        }
        decision = sc.schedule_partial_inr(reports, codebook, power)
    elif scheme == "full_inr":
        reports = {
            k: quant(fb.compute_full_inr(h[:, k], sigma2[k], codebook))
            for k in range(realization.num_users)
        }
        decision = sc.schedule_full_inr(reports, codebook, power, mode=cfg.full_inr_mode)
    elif scheme == "one_bit_inr":
        reports = {
            k: quant(fb.compute_one_bit_inr(h[:, k], sigma2[k], codebook, cfg.gamma_threshold))
            for k in range(realization.num_users)
        }
        decision = sc.schedule_one_bit_inr(reports, codebook, power)
    else:  # pragma: no cover - guarded by config validation
        raise ConfigurationError(f"unknown scheme {scheme!r}")
    return decision, reports


def _grouping_for(cfg, scheme, decision, reports, codebook):
    if not cfg.overhead_use_grouping or scheme not in mt.INR_SCHEMES or not decision.users:
        return None
    table = {}
    for user, beam in zip(decision.users, decision.beams):
        rep = reports[user]
        entry = {}
        for other in decision.beams:
            if scheme == "full_inr":
                entry[other] = float(rep.inrs[other.flat_index(codebook.num_subsets)])
            elif scheme == "partial_inr":
                entry[other] = (
                    float(rep.inrs[other.within_m]) if rep.subset_t == other.subset_t else 0.0
                )
            else:  # one_bit_inr: reconstructed coarse INRs
                if other.within_m == rep.beam.within_m:
                    entry[other] = rep.snr
                else:
                    j = [x for x in range(codebook.num_antennas) if x != rep.beam.within_m]
                    bit = rep.bits[j.index(other.within_m)]
                    entry[other] = rep.snr if bit else 0.0
        table[user] = entry
    return sc.pilot_grouping(decision, table, cfg.pilot_threshold_db)


def run_drop(cfg: ExperimentConfig, point: GridPoint, grid_index: int, drop: int) -> list[dict]:
    """All schemes' result rows for one drop (pure in config and indices)."""
    realization = _drop_channel(cfg, point, grid_index, drop)
    codebook = build_dft_codebook(cfg.m, cfg.t)
    power = 10.0 ** (point.snr_db / 10.0)
    rows = []
    for scheme in cfg.schemes:
        decision, reports = _schedule(cfg, scheme, realization, codebook, power, grid_index, drop)
        decision.validate(power)
        grouping = _grouping_for(cfg, scheme, decision, reports, codebook)
        result = mt.evaluate_drop(
            decision,
            realization.h_true,
            realization.noise_power,
            grouping,
            cfg.overhead_use_grouping,
        )
        lo, hi = point.spread_deg
        rows.append(
            {
                "drop": drop,
                "m": cfg.m,
                "t": cfg.t,
                "k": point.k,
                "snr_db": point.snr_db,
                "err_var": point.err_var,
                "fading": cfg.fading,
                "spread_lo_deg": "" if lo is None else lo,
                "spread_hi_deg": "" if hi is None else hi,
                "scheme": scheme,
                "s": decision.num_selected,
                "subset_t": -1 if decision.subset_t is None else decision.subset_t,
                "users": ";".join(str(u) for u in decision.users),
                "beams": (
                    ";".join(str(b.flat_index(cfg.t)) for b in decision.beams)
                    if decision.beams is not None
                    else ""
                ),
                "kappa": result.overhead_factor,
                "predicted_rate": result.predicted_sum_rate,
                "sum_rate_raw": result.sum_rate_raw,
                "sum_rate_adjusted": result.sum_rate_adjusted,
                "sum_rate_outage": result.sum_rate_outage,
            }
        )
    return rows


def _run_drop_star(args):  # ProcessPoolExecutor needs a top-level callable
    return run_drop(*args)


def run_sweep(cfg: ExperimentConfig, progress: bool = False) -> RunRecord:
    """Execute the full sweep; writes the CSV when cfg.output is set.

    Output row order is (grid point, drop, scheme) regardless of worker
    completion order, and identical (config, base_seed) pairs reproduce
    byte-identical CSV files.
    """
    points = cfg.grid_points()
    tasks = [
        (cfg, point, gi, drop)
        for gi, point in enumerate(points)
        for drop in range(cfg.drops)
    ]
    rows: list[dict] = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for chunk in pool.map(_run_drop_star, tasks, chunksize=16):
                rows.extend(chunk)
    else:
        total = len(tasks)
        for i, task in enumerate(tasks):
            rows.extend(run_drop(*task))
            if progress and (i + 1) % max(1, total // 20) == 0:
                print(f"  {i + 1}/{total} drops", flush=True)
    record = RunRecord(config=cfg, rows=tuple(rows), aggregates=compute_aggregates(rows))
    if cfg.output:
        write_csv(record, cfg.output)
    return record


def write_csv(record: RunRecord, path) -> None:
    buf = io.StringIO()
    buf.write(f"# inrsim run, config_hash={record.config.config_hash()}, schema=1\n")
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in record.rows:
        out = dict(row)
        for col in ("kappa", "predicted_rate", "sum_rate_raw", "sum_rate_adjusted", "sum_rate_outage"):
            out[col] = repr(float(row[col]))
        writer.writerow(out)
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


# ---------------------------------------------------------------------------
# Flat key=value config files
# ---------------------------------------------------------------------------

_PAIR_FIELDS = {"azimuth_range_deg", "quantizer_db_range", "hetero_snr_db_range"}
_LIST_FIELDS = {"k_grid", "snr_db_grid", "err_var_grid"}
_BOOL_FIELDS = {"redraw_geometry", "overhead_use_grouping", "outage_mode", "hetero_snr"}


def config_to_text(cfg: ExperimentConfig) -> str:
    lines = []
    for f in fields(cfg):
        val = getattr(cfg, f.name)
        if val is None:
            text = "none"
        elif f.name == "spread_scenarios_deg":
            text = ",".join(f"{lo}:{hi}" for lo, hi in val)
        elif f.name in _PAIR_FIELDS:
            text = f"{val[0]}:{val[1]}"
        elif isinstance(val, tuple):
            text = ",".join(str(x) for x in val)
        else:
            text = str(val)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


def config_from_text(text: str) -> ExperimentConfig:
    known = {f.name: f for f in fields(ExperimentConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value'")
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in known:
            raise ConfigurationError(f"line {lineno}: unknown config key {key!r}")
        values[key] = _parse_value(key, raw)
    return ExperimentConfig(**values)


def _parse_value(key: str, raw: str):
    if raw.lower() == "none":
        return None
    if key == "spread_scenarios_deg":
        return tuple(tuple(float(x) for x in pair.split(":")) for pair in raw.split(","))
    if key in _PAIR_FIELDS:
        lo, hi = raw.split(":")
        return (float(lo), float(hi))
    if key == "k_grid":
        return tuple(int(x) for x in raw.split(","))
    if key in _LIST_FIELDS:
        return tuple(float(x) for x in raw.split(","))
    if key == "schemes":
        return tuple(s.strip() for s in raw.split(","))
    if key in _BOOL_FIELDS:
        if raw.lower() not in ("true", "false"):
            raise ConfigurationError(f"{key} must be true or false")
        return raw.lower() == "true"
    if key in ("m", "t", "drops", "base_seed", "workers", "quantizer_bits"):
        return int(raw)
    if key in ("fading", "full_inr_mode", "output"):
        return raw
    return float(raw)


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return config_from_text(fh.read())


# ---------------------------------------------------------------------------
# Figure-style presets (desk scale: parameters match the reference setups,
# drop counts are chosen for runtime, not publication smoothness)
# ---------------------------------------------------------------------------

_PRESET_DROPS = 1000


def preset(name: str) -> ExperimentConfig:
    """Named desk-scale sweep configurations (fig1 .. fig8)."""
    builders = {
        "fig1": _preset_fig1,
        "fig2": _preset_fig2,
        "fig3": _preset_fig3,
        "fig4": _preset_fig4,
        "fig5": _preset_fig5,
        "fig6": _preset_fig6,
        "fig7": _preset_fig7,
        "fig8": _preset_fig8,
    }
    if name not in builders:
        raise ConfigurationError(f"unknown preset {name!r} (choose from {sorted(builders)})")
    return builders[name]()


def _preset_fig1():
    # Sum rate vs SNR, independent fading, M=16, K=20.
    return ExperimentConfig(
        m=16,
        t=2,
        k_grid=(20,),
        snr_db_grid=(0.0, 5.0, 10.0, 15.0, 20.0),
        fading="iid",
        schemes=("zfbf_sus", "partial_inr", "rbf"),
        drops=_PRESET_DROPS,
        output="fig1.csv",
    )


def _rate_vs_k(m: int, k_grid, **kw):
    base = dict(
        m=m,
        t=2,
        k_grid=tuple(k_grid),
        snr_db_grid=(10.0,),
        fading="one_ring",
        spread_scenarios_deg=((5.0, 20.0),),
        schemes=("zfbf_sus", "full_inr", "partial_inr", "dft_sinr", "rbf"),
        full_inr_mode="greedy",
        drops=_PRESET_DROPS,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def _preset_fig2():
    return _rate_vs_k(4, range(4, 44, 4), output="fig2.csv")


def _preset_fig3():
    return _rate_vs_k(8, range(4, 44, 4), output="fig3.csv")


def _preset_fig4():
    return _rate_vs_k(16, (4, 8, 16, 24, 32, 40), output="fig4.csv")


def _preset_fig5():
    # Three angular-spread scenarios, M=8.
    return _rate_vs_k(
        8,
        (4, 8, 16, 24, 32, 40),
        spread_scenarios_deg=((5.0, 10.0), (10.0, 20.0), (20.0, 40.0)),
        schemes=("zfbf_sus", "partial_inr", "dft_sinr"),
        output="fig5.csv",
    )


def _preset_fig6():
    # Noisy-CSIT sensitivity, M=16.
    return _rate_vs_k(
        16,
        (8, 16, 24, 32, 40),
        err_var_grid=(0.1, 0.2),
        schemes=("zfbf_sus", "partial_inr", "dft_sinr"),
        output="fig6.csv",
    )


def _preset_fig7():
    # Pilot-overhead-adjusted throughput, M=16, err_var=0.1.
    return _rate_vs_k(
        16,
        (8, 16, 24, 32, 40),
        err_var_grid=(0.1,),
        schemes=("zfbf_sus", "partial_inr", "dft_sinr"),
        output="fig7.csv",
    )


def _preset_fig8():
    # One-bit INR with heterogeneous SNRs, M=16, err_var=0.1, gamma=0.02.
    return _rate_vs_k(
        16,
        (8, 16, 24, 32, 40),
        err_var_grid=(0.1,),
        schemes=("partial_inr", "one_bit_inr"),
        gamma_threshold=0.02,
        hetero_snr=True,
        output="fig8.csv",
    )


def preset_names() -> tuple[str, ...]:
    return tuple(f"fig{i}" for i in range(1, 9))
