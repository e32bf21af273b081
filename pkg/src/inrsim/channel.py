"""User geometry, transmit correlation, Rayleigh fading, and noisy CSIT.

The spatial model is a uniform linear array at the base station with users
surrounded by local scatterers (one-ring model): a user at azimuth ``theta``
with angular spread ``delta`` induces the antenna correlation

    R[p, q] = (1 / 2*delta) * integral_{-delta}^{delta}
              exp(j * 2*pi * D * (p - q) * sin(a + theta)) da

with D the antenna spacing in wavelengths.  All angles are radians here;
degrees are converted at the config boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import toeplitz

from inrsim.errors import ConfigurationError, NumericalError

# Real quadrature precision for the smooth one-ring integrand (delta <= 40 deg).
_GL_NODES = 64

# Eigenvalues may dip slightly negative from roundoff; anything below this is a
# genuinely indefinite matrix and is rejected rather than repaired.
_PSD_TOL = 1e-10


@dataclass(frozen=True)
class UserGeometry:
    """Azimuth, angular spread, and long-term SNR scale of one user."""

    azimuth: float  # radians, in [-pi/2, pi/2]
    angular_spread: float  # radians, > 0
    snr_linear: float = 1.0

    def __post_init__(self):
        if not -np.pi / 2 <= self.azimuth <= np.pi / 2:
            raise ConfigurationError(f"azimuth {self.azimuth} outside [-pi/2, pi/2]")
        if self.angular_spread <= 0:
            raise ConfigurationError("angular spread must be > 0")
        if self.snr_linear <= 0:
            raise ConfigurationError("snr_linear must be > 0")

    @property
    def noise_power(self) -> float:
        """Per-user noise power sigma_k^2 implied by the SNR scale (sigma^2 = 1/snr)."""
        return 1.0 / self.snr_linear


@dataclass(frozen=True)
class CorrelationMatrix:
    """M x M transmit correlation matrix for one user."""

    entries: np.ndarray
    antenna_spacing_d: float

    def __post_init__(self):
        a = self.entries
        if not np.allclose(a, a.conj().T, atol=1e-12):
            raise NumericalError("correlation matrix is not Hermitian")
        if not np.allclose(np.diag(a).real, 1.0, atol=1e-10):
            raise NumericalError("correlation matrix diagonal deviates from 1")


@dataclass(frozen=True)
class ChannelRealization:
    """One fading realization: true channels, noise powers, optional noisy CSIT."""

    h_true: np.ndarray  # (M, K) complex, columns are user channels
    noise_power: np.ndarray  # (K,) sigma_k^2
    h_csit: np.ndarray | None = None  # (M, K), equals h_true when err_var == 0
    err_var: float = 0.0

    def __post_init__(self):
        m, k = self.h_true.shape
        if self.noise_power.shape != (k,):
            raise ConfigurationError("noise_power length must match user count")
        if self.h_csit is not None and self.h_csit.shape != (m, k):
            raise ConfigurationError("h_csit shape must match h_true")

    @property
    def num_antennas(self) -> int:
        return self.h_true.shape[0]

    @property
    def num_users(self) -> int:
        return self.h_true.shape[1]

    @property
    def csit(self) -> np.ndarray:
        """Channel matrix as known for feedback/scheduling (noisy when err_var > 0)."""
        return self.h_true if self.h_csit is None else self.h_csit


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, SeedSequence, or integer seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard circular complex Gaussian, unit variance per entry."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def drop_users(
    count: int,
    azimuth_range: tuple[float, float],
    spread_range: tuple[float, float],
    rng,
    snr_linear: np.ndarray | float = 1.0,
) -> list[UserGeometry]:
    """Draw i.i.d. uniform user geometries (radians). Deterministic given the seed.

    ``snr_linear`` may be a scalar (homogeneous SNR) or a per-user vector for
    heterogeneous-SNR drops.
    """
    if count < 1:
        raise ConfigurationError("need at least one user")
    if azimuth_range[1] < azimuth_range[0] or spread_range[1] < spread_range[0]:
        raise ConfigurationError("empty range")
    rng = as_generator(rng)
    az = rng.uniform(azimuth_range[0], azimuth_range[1], size=count)
    sp = rng.uniform(spread_range[0], spread_range[1], size=count)
    snr = np.broadcast_to(np.asarray(snr_linear, dtype=float), (count,))
    return [UserGeometry(a, s, g) for a, s, g in zip(az, sp, snr)]


def draw_heterogeneous_snr(count: int, rng, db_range: tuple[float, float] = (0.0, 20.0)) -> np.ndarray:
    """Per-user SNR scales, log-uniform over a dB range.

    Stand-in for a full path-loss model: heterogeneity is what matters for the
    one-bit feedback study, not the exact distribution.
    """
    if db_range[1] < db_range[0]:
        raise ConfigurationError("empty dB range")
    rng = as_generator(rng)
    return 10.0 ** (rng.uniform(db_range[0], db_range[1], size=count) / 10.0)


def one_ring_correlation(geometry: UserGeometry, m: int, antenna_spacing_d: float) -> CorrelationMatrix:
    """One-ring transmit correlation via fixed 64-node Gauss-Legendre quadrature.

    The matrix is Toeplitz in (p - q); only the first row is integrated.
    Eigenvalues clipped at zero afterwards (no diagonal renormalization: the
    clipping perturbation is below 1e-10 for this model).
    """
    if m < 1:
        raise ConfigurationError("m must be >= 1")
    if antenna_spacing_d <= 0:
        raise ConfigurationError("antenna spacing must be > 0")
    delta = geometry.angular_spread
    nodes, weights = np.polynomial.legendre.leggauss(_GL_NODES)
    alpha = nodes * delta  # map [-1, 1] -> [-delta, delta]
    lags = np.arange(m)
    phase = 2j * np.pi * antenna_spacing_d * np.sin(alpha + geometry.azimuth)
    # row[k] = (1/2delta) * int exp(j 2 pi D k sin(a+theta)) da; GL weights carry
    # the interval scaling delta, cancelling the 1/(2 delta) prefactor up to 1/2.
    row = 0.5 * (weights[None, :] * np.exp(lags[:, None] * phase[None, :])).sum(axis=1)
    entries = toeplitz(row, row.conj())
    entries = psd_repair(entries)
    return CorrelationMatrix(entries=entries, antenna_spacing_d=antenna_spacing_d)


def psd_repair(matrix: np.ndarray, tol: float = _PSD_TOL) -> np.ndarray:
    """Clip tiny negative eigenvalues to zero; reject genuinely indefinite input."""
    matrix = 0.5 * (matrix + matrix.conj().T)
    eigval, eigvec = np.linalg.eigh(matrix)
    if eigval[0] < -tol:
        raise NumericalError(f"matrix is not PSD (min eigenvalue {eigval[0]:.3e})")
    if eigval[0] >= 0:
        return matrix
    repaired = (eigvec * np.clip(eigval, 0.0, None)) @ eigvec.conj().T
    return 0.5 * (repaired + repaired.conj().T)


def _matrix_sqrt(matrix: np.ndarray) -> np.ndarray:
    # Eigendecomposition rather than Cholesky: one-ring R is near rank
    # deficient at small angular spread and Cholesky fails there.
    eigval, eigvec = np.linalg.eigh(matrix)
    if eigval[0] < -_PSD_TOL:
        raise NumericalError(f"matrix is not PSD (min eigenvalue {eigval[0]:.3e})")
    return (eigvec * np.sqrt(np.clip(eigval, 0.0, None))) @ eigvec.conj().T


def gen_channel(
    m: int,
    count: int,
    rng,
    correlations: list[CorrelationMatrix] | None = None,
    noise_power: np.ndarray | float = 1.0,
) -> ChannelRealization:
    """Draw h_k = R_k^(1/2) g_k with g_k standard circular complex Gaussian.

    ``correlations=None`` means i.i.d. Rayleigh fading (R_k = I for all users).
    """
    rng = as_generator(rng)
    g = complex_gaussian(rng, (m, count))
    if correlations is not None:
        if len(correlations) != count:
            raise ConfigurationError("need one correlation matrix per user")
        h = np.empty_like(g)
        for k, corr in enumerate(correlations):
            h[:, k] = _matrix_sqrt(corr.entries) @ g[:, k]
    else:
        h = g
    sigma2 = np.broadcast_to(np.asarray(noise_power, dtype=float), (count,)).copy()
    return ChannelRealization(h_true=h, noise_power=sigma2, h_csit=None, err_var=0.0)


def add_csit_noise(realization: ChannelRealization, err_var: float, rng) -> ChannelRealization:
    """Attach h_csit = sqrt(1 - err_var) * h_true + sqrt(err_var) * n per entry."""
    if not 0.0 <= err_var < 1.0:
        raise ConfigurationError(f"err_var {err_var} outside [0, 1)")
    if err_var == 0.0:
        return replace(realization, h_csit=realization.h_true, err_var=0.0)
    rng = as_generator(rng)
    noise = complex_gaussian(rng, realization.h_true.shape)
    h_csit = np.sqrt(1.0 - err_var) * realization.h_true + np.sqrt(err_var) * noise
    return replace(realization, h_csit=h_csit, err_var=err_var)
