"""Per-user uplink reports for the four feedback schemes.

All channel quality values travel as linear ratios; dB appears only in the
optional quantizer and at I/O boundaries.  Every function here is pure in
(channel column, noise power, codebook) and safe to map over users.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from inrsim.codebook import BeamIndex, Codebook
from inrsim.errors import ConfigurationError, DegenerateInputError


@dataclass(frozen=True)
class SinrReport:
    """Best beam index and its SINR under the all-M-beams assumption."""

    beam: BeamIndex
    sinr: float


@dataclass(frozen=True)
class FullInrReport:
    """INR toward every codebook beam, ordered by flat index."""

    inrs: np.ndarray  # (M*T,)


@dataclass(frozen=True)
class PartialInrReport:
    """INRs of the best unitary subset plus that subset's index."""

    subset_t: int
    inrs: np.ndarray  # (M,), ordered by within-subset index


@dataclass(frozen=True)
class OneBitInrReport:
    """Best beam, its SNR, and thresholded interference bits for the other beams."""

    beam: BeamIndex
    snr: float
    bits: np.ndarray  # (M-1,) of {0, 1} over subset beams j != m_k, ascending j


def _projections(h_k: np.ndarray, codebook: Codebook) -> np.ndarray:
    """|h^H c_l|^2 for every flat beam index."""
    return np.abs(codebook.vectors.conj().T @ h_k) ** 2


def compute_full_inr(h_k: np.ndarray, noise_power: float, codebook: Codebook) -> FullInrReport:
    """INR_{k,l} = |h_k^H c_l|^2 / sigma_k^2 for all M*T beams."""
    if noise_power <= 0:
        raise ConfigurationError("noise power must be > 0")
    return FullInrReport(inrs=_projections(h_k, codebook) / noise_power)


def compute_partial_inr(h_k: np.ndarray, noise_power: float, codebook: Codebook) -> PartialInrReport:
    """INRs of the subset holding the largest single-beam projection.

    Subset ties break toward the smaller index.
    """
    if noise_power <= 0:
        raise ConfigurationError("noise power must be > 0")
    proj = _projections(h_k, codebook).reshape(codebook.num_antennas, codebook.num_subsets)
    best_t = int(np.argmax(proj.max(axis=0)))
    return PartialInrReport(subset_t=best_t, inrs=proj[:, best_t] / noise_power)


def compute_sinr_report(
    h_k: np.ndarray, noise_power: float, codebook: Codebook, power: float
) -> SinrReport:
    """Best (t, m) and its SINR assuming all M beams of the subset at power P/M.

    gamma(t, m) = |h^H c_m|^2 / ((M/P) sigma^2 + sum_{j != m} |h^H c_j|^2),
    ties broken by smallest flat index.
    """
    if power <= 0:
        raise ConfigurationError("power must be > 0")
    m = codebook.num_antennas
    proj = _projections(h_k, codebook).reshape(m, codebook.num_subsets)
    totals = proj.sum(axis=0)
    sinr = proj / ((m / power) * noise_power + totals[None, :] - proj)
    # Flat index l = m*T + t: scan in flat order for the smallest-index argmax.
    flat_order = sinr.reshape(-1)
    best_flat = int(np.argmax(flat_order))
    within, subset = divmod(best_flat, codebook.num_subsets)
    return SinrReport(beam=BeamIndex(subset_t=subset, within_m=within), sinr=float(flat_order[best_flat]))


def compute_one_bit_inr(
    h_k: np.ndarray, noise_power: float, codebook: Codebook, gamma_threshold: float
) -> OneBitInrReport:
    """Best beam + SNR, and one bit per other subset beam: 1 iff INR/SNR >= threshold."""
    if gamma_threshold <= 0:
        raise ConfigurationError("gamma threshold must be > 0")
    m = codebook.num_antennas
    proj = _projections(h_k, codebook).reshape(m, codebook.num_subsets)
    within, subset = divmod(int(np.argmax(proj.reshape(-1))), codebook.num_subsets)
    snr = float(proj[within, subset] / noise_power)
    if snr == 0.0:
        raise DegenerateInputError("zero channel: SNR of the best beam is 0")
    others = np.delete(proj[:, subset] / noise_power, within)
    bits = (others / snr >= gamma_threshold).astype(np.int8)
    return OneBitInrReport(beam=BeamIndex(subset_t=subset, within_m=within), snr=snr, bits=bits)


def quantize_value(value: float, bits_per_value: int, db_range: tuple[float, float]) -> float:
    """Map one linear CQI onto a uniform dB grid of 2**bits levels.

    Values below the grid floor clamp to 0 linear; rounding is to the nearest
    grid level with ties toward -inf dB.
    """
    lo, hi = db_range
    levels = 2**bits_per_value
    step = (hi - lo) / (levels - 1)
    if value <= 0:
        return 0.0
    db = 10.0 * np.log10(value)
    if db < lo:
        return 0.0
    idx = np.floor((db - lo) / step + 0.5)
    frac = (db - lo) / step - np.floor((db - lo) / step)
    if frac == 0.5:  # tie: round toward -inf dB
        idx = np.floor((db - lo) / step)
    idx = min(int(idx), levels - 1)
    return float(10.0 ** ((lo + idx * step) / 10.0))


def quantize_cqi(report, bits_per_value: int | None, db_range: tuple[float, float] = (-20.0, 25.0)):
    """Quantize every CQI of a report; ``bits_per_value=None`` is pass-through."""
    if bits_per_value is None:
        return report
    if bits_per_value < 1:
        raise ConfigurationError("bits_per_value must be >= 1")
    if db_range[1] <= db_range[0]:
        raise ConfigurationError("empty dB range")

    def q(x):
        return quantize_value(float(x), bits_per_value, db_range)

    if isinstance(report, SinrReport):
        return replace(report, sinr=q(report.sinr))
    if isinstance(report, FullInrReport):
        return replace(report, inrs=np.array([q(x) for x in report.inrs]))
    if isinstance(report, PartialInrReport):
        return replace(report, inrs=np.array([q(x) for x in report.inrs]))
    if isinstance(report, OneBitInrReport):
        return replace(report, snr=q(report.snr))
    raise TypeError(f"unknown report type {type(report)!r}")


def report_csv_row(user: int, report) -> dict:
    """One debug-CSV row per user; bit vectors as 0/1 strings."""
    row = {"user": user, "scheme": "", "subset_t": "", "beam_m": "", "values": "", "bits": ""}
    if isinstance(report, SinrReport):
        row.update(
            scheme="sinr",
            subset_t=report.beam.subset_t,
            beam_m=report.beam.within_m,
            values=repr(report.sinr),
        )
    elif isinstance(report, FullInrReport):
        row.update(scheme="full_inr", values=";".join(repr(float(x)) for x in report.inrs))
    elif isinstance(report, PartialInrReport):
        row.update(
            scheme="partial_inr",
            subset_t=report.subset_t,
            values=";".join(repr(float(x)) for x in report.inrs),
        )
    elif isinstance(report, OneBitInrReport):
        row.update(
            scheme="one_bit_inr",
            subset_t=report.beam.subset_t,
            beam_m=report.beam.within_m,
            values=repr(report.snr),
            bits="".join(str(int(b)) for b in report.bits),
        )
    else:
        raise TypeError(f"unknown report type {type(report)!r}")
    return row
