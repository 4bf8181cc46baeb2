"""Statistical primitives shared by all experiments.

Random-number contract: streams are counter-based (Philox4x64, a documented,
platform-stable algorithm).  The stream for (master seed, replica, role) is
Philox with key = master seed and counter block (0, 0, role, replica), so
replica streams never overlap, are order-independent, and can be consumed in
parallel.  Within a stream, the i-th variate is a pure function of
(seed, replica, role, i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Ecdf",
    "binned_intensity",
    "dkw_epsilon",
    "ks_statistic",
    "pearson_corr",
    "replica_stream",
]

# role ids documented for reproducibility of every consumer
ROLE_MODULI = 0
ROLE_KAC_COEFFS = 1
ROLE_GENERIC = 7


def replica_stream(seed: int, replica: int, role: int = ROLE_MODULI) -> np.random.Generator:
    """Counter-based stream for (seed, replica, role)."""
    if replica < 0 or role < 0:
        raise ValueError("replica and role must be nonnegative")
    bg = np.random.Philox(key=seed, counter=[0, 0, role, replica])
    return np.random.Generator(bg)


@dataclass(frozen=True)
class Ecdf:
    """Empirical CDF: right-continuous step function of a sorted sample."""

    sorted_sample: np.ndarray
    size: int

    @classmethod
    def from_sample(cls, sample) -> "Ecdf":
        arr = np.sort(np.asarray(sample, dtype=float))
        if arr.size == 0:
            raise ValueError("empty sample")
        return cls(sorted_sample=arr, size=int(arr.size))

    def __call__(self, x):
        idx = np.searchsorted(self.sorted_sample, np.asarray(x, dtype=float), side="right")
        out = idx / self.size
        return float(out) if np.ndim(x) == 0 else out

    def left_limit(self, x):
        idx = np.searchsorted(self.sorted_sample, np.asarray(x, dtype=float), side="left")
        out = idx / self.size
        return float(out) if np.ndim(x) == 0 else out


def ks_statistic(sample, cdf: Callable) -> float:
    """Two-sided Kolmogorov-Smirnov distance between a sample and a CDF.

    sup over sample points x_i of max(|Fhat(x_i) - F(x_i)|,
    |Fhat(x_i^-) - F(x_i)|); `sample` may be an Ecdf or raw values.
    """
    ecdf = sample if isinstance(sample, Ecdf) else Ecdf.from_sample(sample)
    x = ecdf.sorted_sample
    f = np.asarray(cdf(x), dtype=float)
    if f.ndim == 0:
        f = np.full(x.shape, float(f))
    hi = np.arange(1, ecdf.size + 1) / ecdf.size
    lo = np.arange(0, ecdf.size) / ecdf.size
    return float(np.max(np.maximum(np.abs(hi - f), np.abs(lo - f))))


def dkw_epsilon(m: int, level: float) -> float:
    """Dvoretzky-Kiefer-Wolfowitz band half-width at confidence 1 - level."""
    return math.sqrt(math.log(2.0 / level) / (2.0 * m))


def pearson_corr(x: Sequence[float], y: Sequence[float]) -> float:
    """Standard sample correlation; degenerate variance is an error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ValueError("need two equal-length samples of size >= 2")
    xc = x - x.mean()
    yc = y - y.mean()
    sx = float(np.sqrt(np.sum(xc * xc)))
    sy = float(np.sqrt(np.sum(yc * yc)))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("degenerate variance")
    return float(np.dot(xc, yc) / (sx * sy))


@dataclass(frozen=True)
class PlanarBins:
    """Rectangular grid of nonoverlapping bins on the plane."""

    re_edges: np.ndarray
    im_edges: np.ndarray

    @classmethod
    def regular(cls, re_lo, re_hi, n_re, im_lo, im_hi, n_im) -> "PlanarBins":
        return cls(
            re_edges=np.linspace(re_lo, re_hi, n_re + 1),
            im_edges=np.linspace(im_lo, im_hi, n_im + 1),
        )

    @property
    def areas(self) -> np.ndarray:
        dre = np.diff(self.re_edges)
        dim = np.diff(self.im_edges)
        return np.outer(dre, dim)


def binned_intensity(replica_ids, points, bins: PlanarBins, n_replicas: int):
    """Per-bin mean intensity (count / (area * replicas)) with standard error.

    `points` are complex positions pooled over replicas; `replica_ids` tags
    each point with its replica so the standard error can be estimated from
    the replica-to-replica spread of counts.
    """
    areas = bins.areas
    if np.any(areas <= 0):
        raise ValueError("zero-area bin")
    if n_replicas < 1:
        raise ValueError("need n_replicas >= 1")
    pts = np.asarray(points, dtype=complex)
    rid = np.asarray(replica_ids, dtype=int)
    n_re = len(bins.re_edges) - 1
    n_im = len(bins.im_edges) - 1
    counts = np.zeros((n_replicas, n_re, n_im))
    if pts.size:
        i = np.searchsorted(bins.re_edges, pts.real, side="right") - 1
        j = np.searchsorted(bins.im_edges, pts.imag, side="right") - 1
        ok = (i >= 0) & (i < n_re) & (j >= 0) & (j < n_im)
        np.add.at(counts, (rid[ok], i[ok], j[ok]), 1.0)
    mean = counts.mean(axis=0) / areas
    if n_replicas > 1:
        se = counts.std(axis=0, ddof=1) / np.sqrt(n_replicas) / areas
    else:
        se = np.full_like(mean, np.nan)
    return mean, se
