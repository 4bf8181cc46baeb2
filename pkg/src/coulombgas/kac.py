"""Kac random polynomials: sampling, certified roots, zero statistics.

p_n(z) = sum_{k=0}^n a_k z^k with i.i.d. centered coefficients normalized to
E[a^2] = 0, E[|a|^2] = 1.  Zeros cluster at the unit circle; the statistics
extracted here are the inner/outer split (outer roots inverted into the
disk), counts in fixed disks, and the n(z - 1) rescaling at the edge.

Roots come from the Aberth-Ehrlich simultaneous iteration (compiled core
when available) started on a circle sized by the coefficient magnitudes,
and are certified through the backward-stable relative residual
|p(z)| / sum_k |a_k| |z|^k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ._roots import aberth

__all__ = [
    "CoefficientLaw",
    "RootSet",
    "RootFindingError",
    "count_in_disk",
    "find_roots",
    "rescale_near_one",
    "sample_polynomial",
    "split_inner_outer",
]

_CIRCLE_TOL = 1e-14
_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class CoefficientLaw:
    """Coefficient distribution with E[a] = 0, E[a^2] = 0, E[|a|^2] = 1."""

    variant: str

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.variant == "complex_gaussian":
            x = rng.standard_normal(size)
            y = rng.standard_normal(size)
            return (x + 1j * y) / math.sqrt(2.0)
        if self.variant == "uniform_disk_normalized":
            # uniform on the disk of radius sqrt(2): E|a|^2 = radius^2/2 = 1
            u = rng.random(size)
            theta = rng.random(size) * 2.0 * math.pi
            return math.sqrt(2.0) * np.sqrt(u) * np.exp(1j * theta)
        if self.variant == "complex_rademacher":
            # uniform on the fourth roots of unity: a^2 averages to zero
            k = rng.integers(0, 4, size)
            return np.exp(1j * (math.pi / 2.0) * k)
        raise ValueError(f"unknown coefficient law {self.variant!r}")


COMPLEX_GAUSSIAN = CoefficientLaw("complex_gaussian")
UNIFORM_DISK = CoefficientLaw("uniform_disk_normalized")
COMPLEX_RADEMACHER = CoefficientLaw("complex_rademacher")


@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray
    residuals: np.ndarray
    degree: int


class RootFindingError(RuntimeError):
    def __init__(self, msg: str, worst_residual: float):
        super().__init__(f"{msg} (worst relative residual {worst_residual:.3e})")
        self.worst_residual = worst_residual


def sample_polynomial(n: int, law: CoefficientLaw, stream: np.random.Generator) -> np.ndarray:
    """n+1 i.i.d. coefficients a_0..a_n; deterministic given the stream."""
    if n < 1:
        raise ValueError("need degree n >= 1")
    return law.sample(stream, n + 1)


def _relative_residuals(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    p = np.full(roots.shape, coeffs[-1], dtype=complex)
    scale = np.full(roots.shape, abs(coeffs[-1]))
    az = np.abs(roots)
    for k in range(len(coeffs) - 2, -1, -1):
        p = p * roots + coeffs[k]
        scale = scale * az + abs(coeffs[k])
    return np.abs(p) / np.maximum(scale, 1e-300)


def find_roots(coeffs, maxiter: int = 500) -> RootSet:
    """All n roots of sum a_k z^k via simultaneous iteration, with residuals.

    Initial guesses sit on a circle of radius |a_0/a_n|^{1/n} (clipped to
    [0.2, 5]) with an angular offset that breaks symmetry.  Declares
    convergence when every coordinate moves less than 1e-14 (1 + |z|);
    non-convergence raises with the worst residual.
    """
    c = np.asarray(coeffs, dtype=complex)
    n = len(c) - 1
    if n < 1:
        raise ValueError("need degree >= 1")
    if c[-1] == 0:
        raise ValueError("leading coefficient must be nonzero")
    if abs(c[0]) > 0:
        r0 = float(np.clip(abs(c[0] / c[-1]) ** (1.0 / n), 0.2, 5.0))
    else:
        r0 = 1.0
    angles = 2.0 * math.pi * (np.arange(n) + 0.25) / n + 0.7 / n
    z0 = r0 * np.exp(1j * angles)
    roots, iters, ok = aberth(c, z0, maxiter, _CIRCLE_TOL)
    res = _relative_residuals(c, roots)
    if not ok:
        # restart once from a perturbed circle before giving up
        z0b = (r0 * 1.21) * np.exp(1j * (angles + 0.31 / n))
        roots_b, _, ok_b = aberth(c, z0b, maxiter, _CIRCLE_TOL)
        res_b = _relative_residuals(c, roots_b)
        if ok_b or res_b.max() < res.max():
            roots, res, ok = roots_b, res_b, ok_b
    if not ok and res.max() > _RESIDUAL_TOL:
        raise RootFindingError(
            f"root iteration did not converge in {maxiter} iterations", float(res.max())
        )
    return RootSet(roots=roots, residuals=res, degree=n)


def split_inner_outer(rootset: RootSet) -> Tuple[np.ndarray, np.ndarray, int]:
    """(inner roots, inverted outer roots 1/z, boundary-flag count).

    Roots within 1e-14 of the unit circle are assigned by the sign of
    |z| - 1 and tallied in the returned count so downstream statistics can
    report the measure-zero boundary cases.
    """
    z = rootset.roots
    dist = np.abs(z) - 1.0
    boundary = int(np.sum(np.abs(dist) < _CIRCLE_TOL))
    inner = z[dist < 0]
    outer = z[dist >= 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        inverted = np.where(outer != 0, 1.0 / outer, np.inf)
    return inner, inverted, boundary


def rescale_near_one(rootset: RootSet, n: int) -> np.ndarray:
    """Edge rescaling {n (z - 1)} of all roots."""
    if n != rootset.degree:
        raise ValueError("n must equal the degree of the root set")
    return n * (rootset.roots - 1.0)


def count_in_disk(points, center: complex, radius: float) -> int:
    """Number of points with |z - center| < radius (strict)."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    pts = np.asarray(points, dtype=complex)
    if pts.size == 0:
        return 0
    return int(np.sum(np.abs(pts - center) < radius))
