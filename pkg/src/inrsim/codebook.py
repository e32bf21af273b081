"""Truncated-DFT codebook with unitary subsets, and random unitary beam sets.

The codebook holds M*T unit-norm vectors: column l of the M*T-point DFT
matrix truncated to its first M rows and scaled by 1/sqrt(M),

    c_l[m] = exp(-j * 2*pi * l * m / (M*T)) / sqrt(M),   m = 0..M-1.

Flat index l decomposes as l = l2*T + l1 with l1 in [0, T) the subset and
l2 in [0, M) the position within the subset; each subset is unitary.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from inrsim.channel import as_generator, complex_gaussian


@dataclass(frozen=True, order=True)
class BeamIndex:
    """Codebook beam index (subset t = l1, within-subset m = l2)."""

    subset_t: int
    within_m: int

    def flat_index(self, t_count: int) -> int:
        return self.within_m * t_count + self.subset_t

    @classmethod
    def from_flat(cls, flat: int, t_count: int) -> "BeamIndex":
        return cls(subset_t=flat % t_count, within_m=flat // t_count)


@dataclass(frozen=True)
class Codebook:
    """M*T beamforming vectors stored as columns of an (M, M*T) array."""

    vectors: np.ndarray
    num_antennas: int
    num_subsets: int

    def __post_init__(self):
        m, mt = self.vectors.shape
        if m != self.num_antennas or mt != self.num_antennas * self.num_subsets:
            raise ValueError("vector array shape inconsistent with (M, T)")

    @property
    def size(self) -> int:
        return self.vectors.shape[1]

    def beam(self, index: BeamIndex | int) -> np.ndarray:
        if isinstance(index, BeamIndex):
            index = index.flat_index(self.num_subsets)
        return self.vectors[:, index]

    def subset(self, t: int) -> np.ndarray:
        """The M vectors {c_l : l1 = t} as columns, ordered by l2."""
        if not 0 <= t < self.num_subsets:
            raise IndexError(f"subset {t} outside [0, {self.num_subsets})")
        return self.vectors[:, self.subset_flat_indices(t)]

    def subset_flat_indices(self, t: int) -> np.ndarray:
        return np.arange(self.num_antennas) * self.num_subsets + t

    def to_csv(self, path) -> None:
        """Dump as rows (flat_l, t, m, antenna, real, imag)."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["flat_l", "t", "m", "antenna", "real", "imag"])
            for flat in range(self.size):
                idx = BeamIndex.from_flat(flat, self.num_subsets)
                for ant, val in enumerate(self.vectors[:, flat]):
                    writer.writerow(
                        [flat, idx.subset_t, idx.within_m, ant, repr(val.real), repr(val.imag)]
                    )


def build_dft_codebook(m: int, t_count: int) -> Codebook:
    """Truncated-DFT codebook of M*T unit-norm vectors in T unitary subsets."""
    if m < 1 or t_count < 1:
        raise ValueError("M and T must be >= 1")
    ants = np.arange(m)[:, None]
    flats = np.arange(m * t_count)[None, :]
    vectors = np.exp(-2j * np.pi * flats * ants / (m * t_count)) / np.sqrt(m)
    return Codebook(vectors=vectors, num_antennas=m, num_subsets=t_count)


def build_random_unitary(m: int, rng) -> np.ndarray:
    """Haar-distributed M x M unitary (QR with phase-fixed diagonal)."""
    rng = as_generator(rng)
    q, r = np.linalg.qr(complex_gaussian(rng, (m, m)))
    d = np.diag(r)
    return q * (d / np.abs(d))
