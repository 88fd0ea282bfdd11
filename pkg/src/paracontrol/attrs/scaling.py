"""Per-attribute standardization and k-means binning."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from paracontrol.kernels import kmeans1d

log = logging.getLogger(__name__)

DEFAULT_BINS = 20


def _as_matrix(vectors) -> np.ndarray:
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError(f"expected a non-empty (n, k) matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("attribute vectors contain non-finite values")
    return x


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    std: np.ndarray
    constant: tuple[int, ...] = ()  # attributes whose spread was zero; std forced to 1

    def apply(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=np.float64) - self.mean) / self.std

    def invert(self, z) -> np.ndarray:
        return np.asarray(z, dtype=np.float64) * self.std + self.mean

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist(), "constant": list(self.constant)}

    @classmethod
    def from_dict(cls, d: dict) -> "Standardizer":
        return cls(np.asarray(d["mean"], dtype=np.float64), np.asarray(d["std"], dtype=np.float64),
                   tuple(d.get("constant", ())))


def fit_standardizer(vectors) -> Standardizer:
    """Fit mean and (population) standard deviation per column."""
    x = _as_matrix(vectors)
    if x.shape[0] < 2:
        raise ValueError("need at least 2 vectors to fit a standardizer")
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    constant = tuple(int(i) for i in np.flatnonzero(std == 0.0))
    if constant:
        log.warning("constant attributes %s: std set to 1", list(constant))
        std = std.copy()
        std[list(constant)] = 1.0
    return Standardizer(mean, std, constant)


@dataclass(frozen=True)
class Discretizer:
    """Bin centers per attribute; a value falls in the bin of its nearest center."""

    centers: tuple[np.ndarray, ...]

    @property
    def n_bins(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.centers)

    def edges(self, attr: int) -> np.ndarray:
        c = self.centers[attr]
        return (c[1:] + c[:-1]) / 2.0

    def discretize(self, x) -> np.ndarray:
        """Bin ids for a vector of length k, or for each row of an (n, k) matrix."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != len(self.centers):
            raise ValueError(f"expected {len(self.centers)} attributes, got {x.shape[-1]}")
        out = np.empty(x.shape, dtype=np.int64)
        for a in range(len(self.centers)):
            out[..., a] = np.searchsorted(self.edges(a), x[..., a], side="right")
        return out

    def bin_center(self, attr: int, b: int) -> float:
        return float(self.centers[attr][b])

    def debin(self, bins) -> np.ndarray:
        bins = np.asarray(bins, dtype=np.int64)
        out = np.empty(bins.shape, dtype=np.float64)
        for a, c in enumerate(self.centers):
            out[..., a] = c[bins[..., a]]
        return out

    def quantize(self, x) -> np.ndarray:
        """Snap values to their bin centers."""
        return self.debin(self.discretize(x))

    def to_dict(self) -> dict:
        return {"centers": [c.tolist() for c in self.centers]}

    @classmethod
    def from_dict(cls, d: dict) -> "Discretizer":
        return cls(tuple(np.asarray(c, dtype=np.float64) for c in d["centers"]))


def fit_discretizer(vectors, bins: int = DEFAULT_BINS) -> Discretizer:
    """One-dimensional k-means per attribute.

    The clustering is solved exactly, so no seed is involved. Columns with
    at most ``bins`` distinct values get one bin per distinct value.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    x = _as_matrix(vectors)
    centers = []
    for a in range(x.shape[1]):
        values, counts = np.unique(x[:, a], return_counts=True)
        if len(values) <= bins:
            centers.append(values.astype(np.float64))
        else:
            centers.append(np.asarray(kmeans1d(values, counts.astype(np.float64), bins), dtype=np.float64))
    return Discretizer(tuple(centers))
