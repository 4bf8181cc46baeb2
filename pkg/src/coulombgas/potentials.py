"""Radial confining potentials V(r) and radial background measures.

A potential here is a continuous function V : [0, oo) -> [0, +oo] that
confines a two-dimensional gas with joint density proportional to

    prod_{i<j} |x_i - x_j|^2  exp(-2(n+chi) sum_i V(|x_i|)).

Circle potentials satisfy V(1) = 0 and V(r) >= max(0, log r), which pins the
equilibrium measure to the uniform measure on the unit circle.  Hard-edge
potentials return +inf outside the closed unit disk.  Extended-real values
are plain floats (math.inf); float arithmetic already saturates at +inf.

Most families used by the experiments are *piecewise log-linear*:
V(r) = c + s*log(r) on each radial segment.  For those, every weighted
radial moment integral has a closed form, which the sampling and kernel
modules exploit.  Families without that structure (power-law tails toward
the circle, tabulated data) expose a vectorized callable plus the list of
breakpoints that quadrature must respect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "LogLinearSegment",
    "RadialPotential",
    "RadialMeasureSpec",
    "CircleConditionsReport",
    "annulus",
    "background",
    "background_potential",
    "check_circle_conditions",
    "circle_log",
    "eval_potential",
    "hard_edge_flat",
    "invert_potential",
    "power_q",
    "power_tail",
    "tabulated",
]


@dataclass(frozen=True)
class LogLinearSegment:
    """V(r) = const + slope*log(r) on [lo, hi)."""

    lo: float
    hi: float
    const: float
    slope: float


@dataclass(frozen=True)
class RadialPotential:
    """A radial confining potential with family metadata.

    Fields
    ------
    family : str
        one of 'circle_log', 'power_q', 'hard_edge_flat', 'annulus',
        'background', 'power_tail', 'tabulated', 'inverted', 'custom'
    params : tuple
        the family's numeric parameters, for reporting.
    confinement : str
        'weak', 'strong' or 'hard'.
    segments : tuple of LogLinearSegment or None
        exact piecewise log-linear description when available.
    fn : callable or None
        vectorized evaluator used when `segments` is None.
    support : (float, float)
        V = +inf outside [support[0], support[1]] (hard walls).
    breakpoints : tuple of float
        radii where V is not smooth; quadrature splits there.
    reference : str
        'lebesgue' or 'lambda_chi'; informational tag set by inversion.
    """

    family: str
    params: tuple = ()
    confinement: str = "weak"
    segments: Optional[Tuple[LogLinearSegment, ...]] = None
    fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    support: Tuple[float, float] = (0.0, math.inf)
    breakpoints: Tuple[float, ...] = ()
    reference: str = "lebesgue"

    def __call__(self, r):
        return eval_potential(self, r)

    @property
    def is_hard(self) -> bool:
        return self.confinement == "hard"


def _as_array(r) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(r, dtype=float)
    return arr, (arr.ndim == 0)


def eval_potential(V: RadialPotential, r):
    """Evaluate V at radius r (scalar or array).  Negative r is a domain error.

    Returns +inf exactly where a hard wall applies; every other value is a
    finite nonnegative float for the shipped families.
    """
    arr, scalar = _as_array(r)
    if np.any(arr < 0):
        raise ValueError("radius must be nonnegative")
    out = np.empty_like(arr)
    lo, hi = V.support
    inside = (arr >= lo) & (arr <= hi)
    out[~inside] = math.inf
    if V.segments is not None:
        vals = np.zeros_like(arr)
        for seg in V.segments:
            mask = inside & (arr >= seg.lo) & (arr < seg.hi)
            if seg.lo == 0.0:
                mask |= inside & (arr == 0.0)
            if not np.any(mask):
                continue
            rm = arr[mask]
            if seg.slope == 0.0:
                vals[mask] = seg.const
            else:
                with np.errstate(divide="ignore"):
                    vals[mask] = seg.const + seg.slope * np.log(rm)
        # close the final half-open segment at hi == support upper bound
        top = V.segments[-1]
        mask = inside & (arr == top.hi)
        if np.any(mask):
            rm = arr[mask]
            vals[mask] = top.const + (top.slope * np.log(rm) if top.slope else 0.0)
        out[inside] = vals[inside]
    else:
        if np.any(inside):
            out[inside] = V.fn(arr[inside])
    return float(out) if scalar else out


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------


def circle_log() -> RadialPotential:
    """The standard circle potential V(r) = max(0, log r)."""
    segs = (
        LogLinearSegment(0.0, 1.0, 0.0, 0.0),
        LogLinearSegment(1.0, math.inf, 0.0, 1.0),
    )
    return RadialPotential("circle_log", (), "weak", segments=segs, breakpoints=(1.0,))


def power_q(q: float) -> RadialPotential:
    """V(r) = max(0, q log r).  Strongly confining when q > 1."""
    if q <= 0:
        raise ValueError("power_q requires q > 0")
    segs = (
        LogLinearSegment(0.0, 1.0, 0.0, 0.0),
        LogLinearSegment(1.0, math.inf, 0.0, q),
    )
    conf = "strong" if q > 1 else "weak"
    return RadialPotential("power_q", (q,), conf, segments=segs, breakpoints=(1.0,))


def hard_edge_flat(inner_radius: float = 0.0) -> RadialPotential:
    """Hard wall at r = 1, V = 0 on [inner_radius, 1].

    With inner_radius > 0 there is a hard inner wall as well; that variant
    supplies the comparison kernels that bound any compactly supported
    perturbation inside the disk.
    """
    if not 0.0 <= inner_radius < 1.0:
        raise ValueError("inner_radius must lie in [0, 1)")
    segs = (LogLinearSegment(inner_radius, 1.0, 0.0, 0.0),)
    return RadialPotential(
        "hard_edge_flat",
        (inner_radius,),
        "hard",
        segments=segs,
        support=(inner_radius, 1.0),
        breakpoints=(inner_radius, 1.0),
    )


def annulus(R: float, tail_q: float) -> RadialPotential:
    """V = 0 on [0,1], V = log r on [1,R], slope tail_q in log r beyond R.

    Continuous at R; with tail_q > 1 the potential is strongly confining and
    the limiting extreme particles accumulate on the annulus 1 < |z| < R.
    """
    if R <= 1.0:
        raise ValueError("annulus requires R > 1")
    if tail_q <= 1.0:
        raise ValueError("annulus requires tail_q > 1")
    segs = (
        LogLinearSegment(0.0, 1.0, 0.0, 0.0),
        LogLinearSegment(1.0, R, 0.0, 1.0),
        LogLinearSegment(R, math.inf, -(tail_q - 1.0) * math.log(R), tail_q),
    )
    return RadialPotential(
        "annulus", (R, tail_q), "strong", segments=segs, breakpoints=(1.0, R)
    )


def power_tail(alpha: float, gamma: float, l_plus: float, l_minus: float) -> RadialPotential:
    """Circle potential with tail r^alpha (V - log r) -> gamma and pinned slopes.

    For r >= 1,

        V(r) = log r + gamma r^{-alpha} + b1 r^{-(alpha+1)} + b2 r^{-(alpha+2)},
        b1 = l_plus - 2 gamma,   b2 = gamma - l_plus,

    which gives V(1) = 0, right slope V'(1+) = 1 + l_plus and
    r^alpha (V - log r) -> gamma.  For r < 1, V(r) = (l_minus - 1)(1 - r),
    so the left slope of V/(1-r) is l_minus - 1 (requires l_minus >= 1).
    """
    if alpha <= 0 or gamma <= 0 or l_plus <= 0:
        raise ValueError("power_tail requires alpha, gamma, l_plus > 0")
    if l_minus < 1.0:
        raise ValueError("power_tail requires l_minus >= 1")
    b1 = l_plus - 2.0 * gamma
    b2 = gamma - l_plus

    def fn(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        out = np.empty_like(r)
        left = r < 1.0
        out[left] = (l_minus - 1.0) * (1.0 - r[left])
        rr = r[~left]
        out[~left] = (
            np.log(rr)
            + gamma * rr ** (-alpha)
            + b1 * rr ** (-(alpha + 1.0))
            + b2 * rr ** (-(alpha + 2.0))
        )
        return out

    # V - log r = r^{-(alpha+2)} (r - 1)(r - (l_plus/gamma - 1)...) is only
    # guaranteed nonnegative for parameter choices with gamma >= ...; verify
    # on a grid so invalid combinations fail at construction.
    probe = np.linspace(1.0, 50.0, 4001)
    if np.any(fn(probe) - np.log(probe) < -1e-13):
        raise ValueError("power_tail parameters violate V >= log r on [1, inf)")
    return RadialPotential(
        "power_tail",
        (alpha, gamma, l_plus, l_minus),
        "weak",
        fn=fn,
        breakpoints=(1.0,),
    )


def tabulated(radii: Sequence[float], values: Sequence[float], confinement: str = "weak") -> RadialPotential:
    """Piecewise-linear interpolation of (radii, values); extrapolation errors."""
    r = np.asarray(radii, dtype=float)
    v = np.asarray(values, dtype=float)
    if r.ndim != 1 or r.size < 2 or np.any(np.diff(r) <= 0):
        raise ValueError("radii must be strictly increasing, length >= 2")
    if v.shape != r.shape:
        raise ValueError("values must match radii")

    def fn(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.any(x < r[0]) or np.any(x > r[-1]):
            raise ValueError("tabulated potential queried outside its grid")
        return np.interp(x, r, v)

    return RadialPotential(
        "tabulated",
        (float(r[0]), float(r[-1])),
        confinement,
        fn=fn,
        support=(float(r[0]), float(r[-1])),
        breakpoints=tuple(float(t) for t in r),
    )


# ---------------------------------------------------------------------------
# background measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialMeasureSpec:
    """A radial positive measure: circle atoms plus an optional radial density.

    atoms : sequence of (radius, mass) with strictly increasing positive radii.
    density : sequence of (lo, hi, rate); each piece contributes
        rate * (min(s, hi) - lo)_+ to nu(D_s), i.e. a piecewise-constant
        radial density of total mass rate * (hi - lo).
    """

    atoms: Tuple[Tuple[float, float], ...] = ()
    density: Tuple[Tuple[float, float, float], ...] = ()

    def __post_init__(self):
        radii = [a[0] for a in self.atoms]
        if any(r <= 0 for r in radii):
            raise ValueError("atom radii must be strictly positive")
        if any(radii[i] >= radii[i + 1] for i in range(len(radii) - 1)):
            raise ValueError("atom radii must be strictly increasing")
        if any(a[1] <= 0 for a in self.atoms):
            raise ValueError("atom masses must be positive")
        for lo, hi, rate in self.density:
            if not (0 <= lo < hi and math.isfinite(hi)):
                raise ValueError("density pieces need 0 <= lo < hi < inf")
            if rate < 0:
                raise ValueError("density rates must be nonnegative")
        if not math.isfinite(self.total_mass):
            raise ValueError("total mass must be finite")

    @property
    def total_mass(self) -> float:
        return sum(m for _, m in self.atoms) + sum(
            rate * (hi - lo) for lo, hi, rate in self.density
        )

    def mass_of_open_disk(self, s: float) -> float:
        """nu(D_s): an atom at radius rho is inside iff s > rho."""
        m = sum(mass for rho, mass in self.atoms if s > rho)
        m += sum(rate * max(0.0, min(s, hi) - lo) for lo, hi, rate in self.density)
        return m

    def breakradii(self) -> Tuple[float, ...]:
        pts = {rho for rho, _ in self.atoms}
        for lo, hi, _ in self.density:
            pts.add(lo)
            pts.add(hi)
        return tuple(sorted(p for p in pts if p > 0))


def background_potential(nu: RadialMeasureSpec, r: float) -> float:
    """The electrostatic-style potential V(r) = int_1^r nu(D_s)/s ds.

    Computed exactly: between breakpoint radii nu(D_s) is affine in s, so
    each piece contributes a log term plus a linear term.  The integral is
    signed for r < 1; r = 0 is a domain error (the integral may diverge).
    """
    if r <= 0:
        raise ValueError("background potential needs r > 0")
    if r == 1.0:
        return 0.0
    sign = 1.0
    a, b = 1.0, float(r)
    if b < a:
        a, b = b, a
        sign = -1.0
    pts = [a] + [p for p in nu.breakradii() if a < p < b] + [b]
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (lo + hi)
        atom_part = sum(mass for rho, mass in nu.atoms if mid > rho)
        lin_rate = sum(rate for plo, phi, rate in nu.density if plo < mid < phi)
        base = sum(
            rate * max(0.0, min(lo, phi) - plo)
            for plo, phi, rate in nu.density
            if not (plo < mid < phi)
        )
        base += sum(
            rate * (lo - plo) for plo, phi, rate in nu.density if plo < mid < phi
        )
        # nu(D_s) = atom_part + base + lin_rate*(s - lo) on [lo, hi]
        const = atom_part + base - lin_rate * lo
        total += const * math.log(hi / lo) + lin_rate * (hi - lo)
    return sign * total


def background(nu: RadialMeasureSpec) -> RadialPotential:
    """RadialPotential for the background measure nu.

    Pure-atom measures give an exact piecewise log-linear potential; a
    density part adds linear-in-r terms, handled through the generic
    evaluator with breakpoints recorded for quadrature.
    """
    total = nu.total_mass
    conf = "strong" if total > 1.0 + 1e-12 else "weak"
    if not nu.density:
        radii = [rho for rho, _ in nu.atoms]
        masses = [m for _, m in nu.atoms]
        segs = []
        bounds = [0.0] + radii + [math.inf]
        cum = 0.0
        # integrate nu(D_s)/s with nu(D_s) = cum on (rho_j, rho_{j+1})
        consts = []
        lo_list = []
        slope_list = []
        for j in range(len(bounds) - 1):
            lo_list.append(bounds[j])
            slope_list.append(cum)
            if j < len(radii):
                cum += masses[j]
        # anchor V(1) = 0 and enforce continuity
        segs_raw = list(zip(lo_list, bounds[1:], slope_list))
        # find the segment containing 1.0 and integrate outward
        consts = [0.0] * len(segs_raw)
        idx1 = max(j for j, (lo, hi, _) in enumerate(segs_raw) if lo <= 1.0)
        consts[idx1] = -segs_raw[idx1][2] * 0.0  # V = slope*log(r) + c, V(1)=0 -> c=0
        for j in range(idx1 + 1, len(segs_raw)):
            lo = segs_raw[j][0]
            prev = segs_raw[j - 1]
            v_at_lo = consts[j - 1] + prev[2] * math.log(lo)
            consts[j] = v_at_lo - segs_raw[j][2] * math.log(lo)
        for j in range(idx1 - 1, -1, -1):
            hi = segs_raw[j][1]
            nxt = segs_raw[j + 1]
            v_at_hi = consts[j + 1] + nxt[2] * math.log(hi)
            consts[j] = v_at_hi - segs_raw[j][2] * math.log(hi)
        segs = tuple(
            LogLinearSegment(lo, hi, c, s)
            for (lo, hi, s), c in zip(segs_raw, consts)
        )
        return RadialPotential(
            "background",
            (total,),
            conf,
            segments=segs,
            breakpoints=nu.breakradii(),
        )

    def fn(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return np.array([background_potential(nu, float(x)) for x in np.atleast_1d(r)]).reshape(r.shape)

    return RadialPotential(
        "background", (total,), conf, fn=fn, breakpoints=nu.breakradii()
    )


# ---------------------------------------------------------------------------
# transforms and checks
# ---------------------------------------------------------------------------


def invert_potential(V: RadialPotential, chi: float) -> RadialPotential:
    """The image potential under z -> 1/z:  Vt(r) = V(1/r) + log r.

    The inverted gas lives against the weighted reference measure
    Lambda_chi(dx) = |x|^{2(chi-1)} dx; the result is tagged accordingly.
    Piecewise log-linear structure is preserved exactly.
    """
    if chi < 0:
        raise ValueError("chi must be nonnegative")
    lo_s, hi_s = V.support
    new_support = (
        0.0 if hi_s == math.inf else 1.0 / hi_s,
        math.inf if lo_s == 0.0 else 1.0 / lo_s,
    )
    if V.segments is not None:
        segs = []
        for seg in V.segments:
            lo = 0.0 if seg.hi == math.inf else 1.0 / seg.hi
            hi = math.inf if seg.lo == 0.0 else 1.0 / seg.lo
            segs.append(LogLinearSegment(lo, hi, seg.const, 1.0 - seg.slope))
        segs.sort(key=lambda s: s.lo)
        # V(0+) finite iff the outermost original segment has slope 0; the
        # inverted potential minus log r then stays bounded (weak class).
        conf = "hard" if new_support[1] != math.inf else (
            "weak" if segs[-1].slope <= 1.0 else "strong"
        )
        return RadialPotential(
            "inverted",
            (V.family,) + V.params + (chi,),
            conf,
            segments=tuple(segs),
            support=new_support,
            breakpoints=tuple(sorted(1.0 / b for b in V.breakpoints if b > 0)),
            reference="lambda_chi",
        )

    base = V

    def fn(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise ValueError("inverted potential undefined at r = 0")
        return eval_potential(base, 1.0 / r) + np.log(r)

    return RadialPotential(
        "inverted",
        (V.family,) + V.params + (chi,),
        V.confinement,
        fn=fn,
        support=new_support,
        breakpoints=tuple(sorted(1.0 / b for b in V.breakpoints if b > 0)),
        reference="lambda_chi",
    )


@dataclass
class CircleConditionsReport:
    passed: bool
    value_at_one: float
    violations: list = field(default_factory=list)


def check_circle_conditions(
    V: RadialPotential, grid: Sequence[float], tol_at_one: float = 1e-9
) -> CircleConditionsReport:
    """Verify V(1) = 0 (within tol) and V(r) >= max(0, log r) on the grid.

    The inequality is closed, so it is checked with zero slack; every
    violation is listed rather than raised.
    """
    grid = np.asarray(list(grid), dtype=float)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    report = CircleConditionsReport(True, float(eval_potential(V, 1.0)))
    if abs(report.value_at_one) > tol_at_one:
        report.passed = False
        report.violations.append(("value_at_one", 1.0, report.value_at_one))
    vals = np.asarray([eval_potential(V, float(r)) for r in grid])
    lower = np.maximum(0.0, np.log(np.maximum(grid, np.finfo(float).tiny)))
    bad = vals < lower
    for r, v, lb in zip(grid[bad], vals[bad], lower[bad]):
        report.passed = False
        report.violations.append(("lower_bound", float(r), float(v - lb)))
    return report
