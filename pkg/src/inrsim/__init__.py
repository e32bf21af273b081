"""Monte Carlo simulator for codebook-based limited-feedback MU-MIMO downlink.

Subpackages cover channel generation (one-ring correlated Rayleigh fading),
DFT codebooks, the four uplink feedback schemes (SINR, full/partial/one-bit
INR), user-selection algorithms including flexible INR scheduling, realized
throughput metrics with dedicated-pilot overhead, asymptotic throughput
formulas, and an experiment harness with figure-style presets.
"""

from inrsim import analysis, channel, codebook, feedback, metrics, scheduler

__all__ = [
    "analysis",
    "channel",
    "codebook",
    "feedback",
    "metrics",
    "scheduler",
]

__version__ = "0.1.0"
