"""Reproducing kernels of radial determinantal gases, finite-n and limiting.

A radial kernel is K(z,w) = sum_k a_k z^k wbar^k * weight(z) weight(w); the
coefficients are stored as logs and every series is assembled by factoring
out the largest log term, so kernels with exponents of order 1e4 evaluate
stably.  Limiting kernels (Bergman-type exterior/annulus series, the finite
and infinite power-tail families at the origin, the hard-edge and two-slope
edge kernels at the unit circle, and the Kac/GAF covariance) are evaluated
with certified truncation bounds and Taylor branches across removable
singularities (threshold 1e-3, degree-8 polynomials are exact in doubles).

Non-radial potentials go through a monomial Gram matrix: K_n(z,w) =
m(z)^T G^{-1} conj(m(w)) with G_{jk} = <z^j, z^k> under the weighted area
inner product.  Constant bumps on disks are integrated exactly (the angular
integral over the bump is a closed-form arc integral); arbitrary weights use
tensor Gauss-Legendre quadrature in (r, theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad
from scipy.linalg import cho_factor, cho_solve

from .kostlan import ComponentLaw, GasSpec
from .potentials import RadialMeasureSpec, background, background_potential

__all__ = [
    "BackgroundBlocks",
    "DiskBump",
    "LimitKernelSpec",
    "NonRadialKernel",
    "RadialKernel",
    "edge_rescaled_bergman",
    "eval_kernel",
    "eval_limit_kernel",
    "first_intensity_limit_hard",
    "gaf_covariance",
    "gaf_finite_covariance",
    "gaf_intensity",
    "hard_edge_rescaled_kernel",
    "limit_edge_kernel_E",
    "limit_edge_kernel_hard",
    "nonradial_kernel",
    "radial_coefficients",
    "radial_kernel",
    "union_kernel",
]

_TAYLOR_SWITCH = 1e-3
_TAIL_REL = 1e-12


# ---------------------------------------------------------------------------
# finite-n radial kernels
# ---------------------------------------------------------------------------


def radial_coefficients(spec: GasSpec) -> np.ndarray:
    """log a_k^{(n)} for k < n, from the weighted radial moment integrals.

    (a_k^{(n)})^{-1} = 2 pi * int r^{2k+1+me} e^{-2(n+chi)V(r)} dr; closed
    forms apply to every piecewise log-linear family, log-domain quadrature
    otherwise.  A divergent integral raises an error naming k.
    """
    out = np.empty(spec.n)
    for k in range(spec.n):
        log_Z = ComponentLaw(spec, k).log_normalization
        out[k] = -(math.log(2.0 * math.pi) + log_Z)
    return out


@dataclass(frozen=True)
class RadialKernel:
    """K(z,w) = sum_k exp(log_coeffs[k]) z^k wbar^k weight(z) weight(w)."""

    log_coeffs: np.ndarray
    log_weight: Callable[[np.ndarray], np.ndarray]  # takes |z|, returns log weight
    reference: str = "lebesgue"

    def __call__(self, z: complex, w: complex) -> complex:
        return eval_kernel(self, z, w)


def radial_kernel(spec: GasSpec) -> RadialKernel:
    """Finite-n kernel of the gas, weight e^{-(n+chi) V(|z|)}."""
    log_c = radial_coefficients(spec)
    n_chi = spec.n + spec.chi
    V = spec.potential

    def log_weight(radii: np.ndarray) -> np.ndarray:
        vals = np.asarray(
            [V(float(r)) for r in np.atleast_1d(np.asarray(radii, dtype=float))]
        )
        with np.errstate(invalid="ignore"):
            out = -n_chi * vals
        return out if np.ndim(radii) else float(out[0])

    ref = "lambda_chi" if spec.measure_exponent != 0.0 else "lebesgue"
    return RadialKernel(log_coeffs=log_c, log_weight=log_weight, reference=ref)


def eval_kernel(K: RadialKernel, z: complex, w: complex) -> complex:
    """Stable series evaluation of a RadialKernel at one pair of points."""
    if not (np.isfinite(z.real) and np.isfinite(z.imag)
            and np.isfinite(w.real) and np.isfinite(w.imag)):
        raise ValueError("kernel arguments must be finite complex numbers")
    if len(K.log_coeffs) < 1:
        raise ValueError("kernel needs at least one coefficient")
    x = z * np.conj(w)
    mod = abs(x)
    ks = np.arange(len(K.log_coeffs))
    if mod == 0.0:
        logs = np.where(ks == 0, K.log_coeffs, -np.inf)
        phases = np.zeros_like(logs)
    else:
        logs = K.log_coeffs + ks * math.log(mod)
        phases = ks * np.angle(x)
    m = float(np.max(logs))
    if m == -np.inf:
        return 0.0 + 0.0j
    s = np.sum(np.exp(logs - m) * np.exp(1j * phases))
    lw = K.log_weight(abs(z)) + K.log_weight(abs(w))
    if lw == -np.inf or np.isnan(lw):
        return 0.0 + 0.0j
    return complex(np.exp(m + lw) * s)


def _sum_kplus1_xk(n: int, x: np.ndarray) -> np.ndarray:
    """sum_{k=0}^{n-1} (k+1) x^k, stable near x = 1 (3-term Taylor there)."""
    x = np.asarray(x, dtype=complex)
    d = x - 1.0
    out = np.empty_like(x)
    near = np.abs(d) < 1e-6
    if np.any(near):
        s0 = n * (n + 1) / 2.0
        s1 = (n - 1) * n * (n + 1) / 3.0
        s2 = ((n - 1) * n / 2.0) ** 2 - (n - 1) * n / 2.0
        dd = d[near]
        out[near] = s0 + s1 * dd + 0.5 * s2 * dd * dd
    far = ~near
    if np.any(far):
        xf = x[far]
        df = d[far]
        out[far] = (1.0 - (n + 1) * xf**n + n * xf ** (n + 1)) / (df * df)
    return out


def hard_edge_rescaled_kernel(n: int, alpha, beta) -> np.ndarray:
    """(pi/n^2) K_n(1 - a/n, 1 - b/n) for the flat hard-edge gas (chi = 1).

    a_k = (k+1)/pi, so the rescaled kernel is (1/n^2) sum (k+1) x^k with
    x = (1 - a/n)(1 - conj(b)/n); vectorized over broadcastable arrays.
    """
    a = np.asarray(alpha, dtype=complex)
    b = np.asarray(beta, dtype=complex)
    x = (1.0 - a / n) * (1.0 - np.conj(b) / n)
    return _sum_kplus1_xk(n, x) / n**2


# ---------------------------------------------------------------------------
# limiting kernels at the unit circle
# ---------------------------------------------------------------------------


def limit_edge_kernel_hard(s) -> complex:
    """-e^{-s}/s + (1 - e^{-s})/s^2, the hard-edge limit at the circle.

    The singularity at s = 0 is removable; for |s| < 1e-3 the degree-8
    Taylor polynomial (coefficients (-1)^m (m+1)/(m+2)!) is used.
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    out = np.empty_like(s_arr)
    small = np.abs(s_arr) < _TAYLOR_SWITCH
    if np.any(small):
        ss = s_arr[small]
        acc = np.zeros_like(ss)
        for m in range(8, -1, -1):
            c = (-1.0) ** m * (m + 1) / math.factorial(m + 2)
            acc = acc * ss + c
        out[small] = acc
    big = ~small
    if np.any(big):
        ss = s_arr[big]
        e = np.exp(-ss)
        out[big] = -e / ss + (1.0 - e) / (ss * ss)
    return out if np.ndim(s) else complex(out[0])


def first_intensity_limit_hard(r) -> float:
    """Limiting first intensity at the hard edge: kernel value over pi.

    rho(r) = -e^{-2r}/(2 pi r) + (1 - e^{-2r})/(4 pi r^2); the value at
    r = 0 is 1/(2 pi).
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise ValueError("r must be nonnegative")
    vals = limit_edge_kernel_hard(2.0 * r_arr)
    out = np.real(np.atleast_1d(vals)) / math.pi
    return out if np.ndim(r) else float(out[0])


def _edge_moments(s: complex, upper: float) -> Tuple[complex, complex]:
    """(int_0^U u e^{su} du, int_0^U u^2 e^{su} du), series branch near 0."""
    if abs(s) * upper < _TAYLOR_SWITCH:
        a1 = sum(
            s**m * upper ** (m + 2) / (math.factorial(m) * (m + 2)) for m in range(9)
        )
        a2 = sum(
            s**m * upper ** (m + 3) / (math.factorial(m) * (m + 3)) for m in range(9)
        )
        return a1, a2
    e = np.exp(s * upper)
    a1 = e * (upper / s - 1.0 / s**2) + 1.0 / s**2
    a2 = e * (upper**2 / s - 2.0 * upper / s**2 + 2.0 / s**3) - 2.0 / s**3
    return a1, a2


def limit_edge_kernel_E(q: float, Q: float, alpha: complex, beta: complex) -> complex:
    """The two-slope edge kernel at the circle:

    K_E(a, b) = e^{-P(a)} e^{-P(conj b)} / pi *
                int_q^{min(Q,1)} (Q-t)(t-q)/(Q-q) e^{(a + conj b) t} dt,

    with P(x) = Q Re(x) for Re(x) >= 0 and q Re(x) otherwise.  The integral
    is evaluated in closed form by integration by parts, with a series
    branch when |s| (min(Q,1) - q) < 1e-3.
    """
    if not (0.0 <= q < Q):
        raise ValueError("need 0 <= q < Q")
    if q >= 1.0:
        raise ValueError("need q < 1")
    B = min(Q, 1.0)
    C = Q - q
    D = B - q
    s = complex(alpha) + np.conj(complex(beta))
    a1, a2 = _edge_moments(s, D)
    integral = np.exp(s * q) * (C * a1 - a2)  # = int_q^B (Q-t)(t-q) e^{st} dt

    def P(x: complex) -> float:
        re = x.real
        return Q * re if re >= 0 else q * re

    pref = math.exp(-P(complex(alpha)) - P(complex(beta)))
    return complex(pref * integral / (math.pi * C))


def edge_rescaled_bergman(q: float, Q: float, n: int, z: complex, w: complex) -> complex:
    """Phase-conjugated n^2 K_E(nz, nw) on the left half-plane.

    Equals (1/(pi (Q-q))) int_0^{n(min(Q,1)-q)} (Q - q - u/n) u e^{(z+conj w)u} du
    and converges to the Bergman kernel 1/(pi (z + conj w)^2) as n grows.
    """
    if not (0.0 <= q < Q and q < 1.0):
        raise ValueError("need 0 <= q < Q and q < 1")
    s = complex(z) + np.conj(complex(w))
    if s.real >= 0:
        raise ValueError("rescaled edge kernel needs Re(z + conj w) < 0")
    C = Q - q
    U = n * (min(Q, 1.0) - q)
    a1, a2 = _edge_moments(s, U)
    return complex((C * a1 - a2 / n) / (math.pi * C))


def gaf_covariance(z: complex, w: complex) -> complex:
    """(e^{z + conj w} - 1)/(z + conj w), with the removable zero at 0."""
    s = complex(z) + np.conj(complex(w))
    if abs(s) < _TAYLOR_SWITCH:
        acc = 0.0 + 0.0j
        for m in range(8, -1, -1):
            acc = acc * s + 1.0 / math.factorial(m + 1)
        return complex(acc)
    return complex((np.exp(s) - 1.0) / s)


def gaf_finite_covariance(n: int, z, w) -> np.ndarray:
    """(1/n) sum_{k=0}^{n} (1+z/n)^k (1+conj(w)/n)^k, vectorized.

    Uses the closed geometric form (x^{n+1} - 1)/(n (x-1)) with
    x - 1 = (z + conj w + z conj w / n)/n computed without cancellation.
    """
    z = np.asarray(z, dtype=complex)
    wbar = np.conj(np.asarray(w, dtype=complex))
    d = np.asarray((z + wbar + z * wbar / n) / n)
    L = (n + 1) * np.log(1.0 + d)
    small = np.abs(L) < 1e-6
    safe_d = np.where(d == 0, 1.0, d)
    ratio = np.where(np.abs(d) > 1e-14, np.log(1.0 + d) / safe_d, 1.0 - d / 2.0)
    small_val = (n + 1) / n * ratio * (1.0 + L / 2.0 + L * L / 6.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        big_val = (np.exp(L) - 1.0) / (n * safe_d)
    out = np.where(small, small_val, big_val)
    return out if out.ndim else complex(out)


def _log_h_series(s: float, order: int = 30):
    """h, h', h'' of h(s) = (e^s - 1)/s by series, accurate for |s| <= 0.5."""
    h = sum(s**m / math.factorial(m + 1) for m in range(order + 1))
    hp = sum(m * s ** (m - 1) / math.factorial(m + 1) for m in range(1, order + 1))
    hpp = sum(
        m * (m - 1) * s ** (m - 2) / math.factorial(m + 1) for m in range(2, order + 1)
    )
    return h, hp, hpp


def gaf_intensity(z: complex) -> float:
    """First intensity of the zeros of the edge Gaussian analytic function.

    By the Edelman-Kostlan formula rho(z) = (1/4 pi) * Laplacian of
    log K(z, z) with K(z, z) = h(2 Re z), h(s) = (e^s - 1)/s, which reduces
    to f''(2 Re z)/pi for f = log h.  At z = 0 this is 1/(12 pi).
    """
    s = 2.0 * complex(z).real
    if abs(s) <= 0.5:
        h, hp, hpp = _log_h_series(s)
    else:
        e = math.exp(s)
        h = (e - 1.0) / s
        hp = ((s - 1.0) * e + 1.0) / s**2
        hpp = ((s * s - 2.0 * s + 2.0) * e - 2.0) / s**3
    fpp = hpp / h - (hp / h) ** 2
    return fpp / math.pi


# ---------------------------------------------------------------------------
# limiting kernels away from the circle (series with certified tails)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitKernelSpec:
    """Tagged limiting kernel; params per variant:

    B_R: (R, chi)                exterior Bergman-type, |z|,|w| > R
    A_R: (R, chi)                annulus, 1 < |z|,|w|; 0 beyond R
    F_alpha: (alpha, chi, gamma, l_plus, l_minus)   finite family at 0
    I_alpha: (alpha, chi, gamma)                    infinite family at 0
    G_alpha: (alpha, chi, lam, l_plus, l_minus)     finite family, Lambda_chi
    M_A: (intervals, chi)        zero-potential set A, |z|,|w| < max radius
    edge_hard: ()                hard-edge circle kernel in s = z + conj w
    edge_E: (q, Q)               two-slope edge kernel
    bergman_disk: ()             1/(pi (1 - z conj w)^2)
    bergman_halfplane: ()        1/(pi (z + conj w)^2), Re < 0
    gaf_F: ()                    Kac/GAF covariance
    """

    variant: str
    params: tuple = ()

    def __call__(self, z: complex, w: complex) -> complex:
        return eval_limit_kernel(self, z, w)


def _series_sum(term_log_mag, term_phase, ratio_bound_fn, max_terms=100_000):
    """Sum sum_k exp(log_mag_k + i phase_k) until the certified tail bound
    drops below 1e-12 of the partial sum."""
    total = 0.0 + 0.0j
    k = 0
    while k < max_terms:
        lm = term_log_mag(k)
        term = math.exp(lm) * np.exp(1j * term_phase(k))
        total += term
        bound = ratio_bound_fn(k, lm)
        if bound <= _TAIL_REL * max(abs(total), 1e-300):
            return total
        k += 1
    raise RuntimeError("limit-kernel series did not reach its tail bound")


def eval_limit_kernel(spec: LimitKernelSpec, z: complex, w: complex) -> complex:
    v = spec.variant
    z = complex(z)
    w = complex(w)
    x = z * np.conj(w)

    if v == "B_R":
        R, chi = spec.params
        if abs(z) <= R or abs(w) <= R:
            raise ValueError("B_R kernel defined for |z|, |w| > R")
        u = (R * R) / x
        au = abs(u)
        pref = R ** (2.0 * chi) / (math.pi * abs(x) ** (chi + 1.0))

        def bound(k, lm):
            # sum_{j>k} (j+chi)|u|^j <= |u|^{k+1}((k+1+chi)/(1-|u|)+|u|/(1-|u|)^2)
            t = au ** (k + 1)
            return pref * t * ((k + 1 + chi) / (1 - au) + au / (1 - au) ** 2)

        s = _series_sum(
            lambda k: math.log(k + chi) + k * math.log(au),
            lambda k: k * np.angle(u),
            bound,
        )
        return complex(pref * s)

    if v == "A_R":
        R, chi = spec.params
        if abs(z) <= 1.0 or abs(w) <= 1.0:
            raise ValueError("A_R kernel defined for |z|, |w| > 1")
        if abs(z) > R or abs(w) > R:
            return 0.0 + 0.0j
        u = 1.0 / x
        au = abs(u)
        pref = 1.0 / (math.pi * abs(x) ** (chi + 1.0))
        cmax = 1.0 / (1.0 - R ** (-2.0 * chi))

        def bound(k, lm):
            t = au ** (k + 1)
            return pref * cmax * t * ((k + 1 + chi) / (1 - au) + au / (1 - au) ** 2)

        s = _series_sum(
            lambda k: math.log(k + chi)
            - math.log1p(-(R ** -(2.0 * k + 2.0 * chi)))
            + k * math.log(au),
            lambda k: k * np.angle(u),
            bound,
        )
        return complex(pref * s)

    if v in ("F_alpha", "G_alpha"):
        if v == "F_alpha":
            alpha, chi, gamma, l_plus, l_minus = spec.params
            lam = gamma
        else:
            alpha, chi, lam, l_plus, l_minus = spec.params
        if z == 0 or w == 0:
            if v == "F_alpha":
                raise ValueError("F_alpha kernel defined on C \\ {0}")
        total = 0.0 + 0.0j
        k = 0
        while 2 * k + 2 * chi <= alpha + 1e-12:
            e = 2.0 * k + 2.0 * chi
            if abs(e - alpha) < 1e-9:
                inv = math.pi * (1.0 / (alpha * lam) + 1.0 / l_plus + 1.0 / l_minus)
                a_k = 1.0 / inv
            elif e < alpha:
                s_par = e / alpha
                a_k = alpha * (2.0 * lam) ** s_par / (
                    2.0 * math.pi * math.exp(math.lgamma(s_par))
                )
            else:
                break
            total += a_k * (x ** (-k) if v == "F_alpha" else x**k)
            k += 1
        if v == "F_alpha":
            pref = abs(x) ** (-(chi + 1.0)) * math.exp(
                -gamma / abs(z) ** alpha - gamma / abs(w) ** alpha
            )
        else:
            pref = math.exp(-lam * abs(z) ** alpha - lam * abs(w) ** alpha)
        return complex(pref * total)

    if v == "I_alpha":
        alpha, chi, gamma = spec.params
        if z == 0 or w == 0:
            raise ValueError("I_alpha kernel defined on C \\ {0}")
        linv = math.log(1.0 / abs(x))

        def log_mag(k):
            s_par = (2.0 * k + 2.0 * chi) / alpha
            return (
                math.log(alpha)
                + s_par * math.log(2.0 * gamma)
                - math.log(2.0 * math.pi)
                - math.lgamma(s_par)
                + k * linv
            )

        def bound(k, lm):
            nxt = log_mag(k + 1)
            if nxt - lm < math.log(0.5):
                return 2.0 * math.exp(nxt)
            return math.inf

        s = _series_sum(log_mag, lambda k: -k * np.angle(x), bound)
        pref = abs(x) ** (-(chi + 1.0)) * math.exp(
            -gamma / abs(z) ** alpha - gamma / abs(w) ** alpha
        )
        return complex(pref * s)

    if v == "M_A":
        intervals, chi = spec.params
        R = max(b for _, b in intervals)
        if abs(z) >= R or abs(w) >= R:
            raise ValueError("M_A kernel defined for |z|, |w| < max radius of A")
        ax = abs(x)
        ratio = ax / (R * R)
        a_top = max(a for a, b in intervals if b == R)
        c0 = 1.0 - (a_top / R) ** (2.0 * chi) if a_top > 0 else 1.0

        def log_inv_coeff(k):
            e = 2.0 * k + 2.0 * chi
            pieces = [
                e * math.log(b) + (math.log1p(-((a / b) ** e)) if a > 0 else 0.0)
                for a, b in intervals
            ]
            m = max(pieces)
            return (
                math.log(2.0 * math.pi)
                - math.log(e)
                + m
                + math.log(sum(math.exp(p - m) for p in pieces))
            )

        def log_mag(k):
            if ax == 0.0:
                return -log_inv_coeff(0) if k == 0 else -math.inf
            return -log_inv_coeff(k) + k * math.log(ax)

        def bound(k, lm):
            # a_j <= e_j R^{-e_j} / (2 pi c0), so the dropped tail obeys
            # sum_{j>k} a_j |x|^j <= R^{-2 chi}/(2 pi c0) * rho^{k+1}
            #   * (e_{k+1}/(1-rho) + 2 rho/(1-rho)^2),  rho = |x|/R^2
            if ratio == 0.0:
                return 0.0
            lead = R ** (-2.0 * chi) / (2.0 * math.pi * c0)
            e_next = 2.0 * (k + 1) + 2.0 * chi
            return lead * ratio ** (k + 1) * (
                e_next / (1.0 - ratio) + 2.0 * ratio / (1.0 - ratio) ** 2
            )

        s = _series_sum(log_mag, lambda k: k * np.angle(x) if ax > 0 else 0.0, bound)
        return complex(s)

    if v == "edge_hard":
        return complex(limit_edge_kernel_hard(z + np.conj(w)))
    if v == "edge_E":
        q, Q = spec.params
        return limit_edge_kernel_E(q, Q, z, w)
    if v == "bergman_disk":
        if abs(z) >= 1.0 or abs(w) >= 1.0:
            raise ValueError("Bergman disk kernel needs |z|, |w| < 1")
        return complex(1.0 / (math.pi * (1.0 - x) ** 2))
    if v == "bergman_halfplane":
        if z.real >= 0 or w.real >= 0:
            raise ValueError("Bergman half-plane kernel needs Re z, Re w < 0")
        return complex(1.0 / (math.pi * (z + np.conj(w)) ** 2))
    if v == "gaf_F":
        return gaf_covariance(z, w)
    raise ValueError(f"unknown limit kernel variant {spec.variant!r}")


# ---------------------------------------------------------------------------
# independent unions and inner/outer blocks
# ---------------------------------------------------------------------------


def union_kernel(K1, K2, point1: Tuple[complex, int], point2: Tuple[complex, int]) -> complex:
    """Kernel of the independent union: K1 on side 1, K2 on side 2, 0 across."""
    z, tag_z = point1
    w, tag_w = point2
    if tag_z not in (1, 2) or tag_w not in (1, 2):
        raise ValueError("component tags must be 1 or 2")
    if tag_z != tag_w:
        return 0.0 + 0.0j
    return complex(K1(z, w) if tag_z == 1 else K2(z, w))


class BackgroundBlocks:
    """Inner/outer/cross blocks of the conjugated kernel of a background gas.

    Built for chi = 1; the inner block lives on the disk of radius R (the
    inner edge of supp nu), the outer one on the disk of radius 1/Rbar after
    inversion.  The cross blocks carry w^{n-1-k}-type powers and vanish as
    n -> infinity, which is how inner/outer independence is quantified.
    """

    def __init__(self, nu: RadialMeasureSpec, n: int):
        self.n = n
        radii = [rho for rho, _ in nu.atoms] + [piece[0] for piece in nu.density] + [
            piece[1] for piece in nu.density
        ]
        if not radii:
            raise ValueError("background measure must have support")
        self.R = min(r for r in radii if r > 0)
        self.Rbar = max(radii)
        self.V_at_Rbar = background_potential(nu, self.Rbar)
        spec = GasSpec(n=n, chi=1.0, potential=background(nu))
        self.log_b = radial_coefficients(spec)
        self.log_E = -(n + 1.0) * (self.V_at_Rbar - math.log(self.Rbar))

    def block(self, z: complex, w: complex, which: str) -> complex:
        n = self.n
        ks = np.arange(n)
        b = np.exp(self.log_b)
        zb = complex(z)
        wb = np.conj(complex(w))
        if which == "II":
            return complex(np.sum(b * zb**ks * wb**ks))
        if which == "IO":
            return complex(
                math.exp(self.log_E) * np.sum(b * zb**ks * wb ** (n - 1 - ks))
            )
        if which == "OI":
            return complex(
                math.exp(self.log_E) * np.sum(b * zb ** (n - 1 - ks) * wb**ks)
            )
        if which == "OO":
            return complex(
                math.exp(2.0 * self.log_E)
                * np.sum(b * zb ** (n - 1 - ks) * wb ** (n - 1 - ks))
            )
        raise ValueError(f"unknown block {which!r}; use II, IO, OI or OO")

    def cross_sup(self, radius: float, n_phase: int = 128) -> float:
        """sup over |z|,|w| <= radius of |IO|; by maximum modulus it is
        attained at |z| = |w| = radius and depends only on arg(z) - arg(w)."""
        ks = np.arange(self.n)
        b = np.exp(self.log_b)
        coeff = b * radius ** (self.n - 1)
        deltas = np.linspace(0.0, 2.0 * math.pi, n_phase, endpoint=False)
        vals = [
            abs(np.sum(coeff * np.exp(1j * d * ks))) for d in deltas
        ]
        return math.exp(self.log_E) * float(np.max(vals))


# ---------------------------------------------------------------------------
# non-radial kernels through the monomial Gram matrix
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiskBump:
    """V = height on the closed disk |z - center| <= radius, 0 elsewhere."""

    height: float
    center: complex
    radius: float

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = np.where(np.abs(z - self.center) <= self.radius, self.height, 0.0)
        return out if out.ndim else float(out)


class GramNotPositiveDefiniteError(RuntimeError):
    def __init__(self, cond_estimate: float):
        super().__init__(
            f"monomial Gram matrix is not numerically positive definite "
            f"(condition estimate {cond_estimate:.3e})"
        )
        self.cond_estimate = cond_estimate


class NonRadialKernel:
    """K_n(z,w) = m(z)^T G^{-1} conj(m(w)) for the monomial vector m."""

    def __init__(self, gram: np.ndarray, n: int, chi: float):
        self.gram = gram
        self.n = n
        self.chi = chi
        diag = np.real(np.diag(gram))
        pivot_tol = 1e-12 * float(np.max(diag))
        try:
            self._cho = cho_factor(gram, lower=True)
        except np.linalg.LinAlgError as exc:
            raise GramNotPositiveDefiniteError(float(np.linalg.cond(gram))) from exc
        if np.min(np.real(np.diag(self._cho[0]))) ** 2 < pivot_tol:
            raise GramNotPositiveDefiniteError(float(np.linalg.cond(gram)))

    def _monomials(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return z[:, None] ** np.arange(self.n)[None, :]

    def eval(self, z: complex, w: complex) -> complex:
        mz = self._monomials(z)[0]
        mw = self._monomials(w)[0]
        y = cho_solve(self._cho, np.conj(mw))
        return complex(mz @ y)

    def diag(self, z) -> np.ndarray:
        M = self._monomials(z)
        Y = cho_solve(self._cho, np.conj(M.T))
        vals = np.real(np.einsum("ik,ki->i", M, Y))
        return vals if np.ndim(z) else float(vals[0])

    def __call__(self, z, w):
        return self.eval(z, w)


def _bump_angular_integrals(c: float, rho: float, m_max: int, powers: Sequence[int],
                            epsabs: float = 1e-13) -> dict:
    """B[m][P] = int r^P A_m(r) dr over the bump, A_m the arc integral of e^{im t}."""
    out = {}
    r_full = max(0.0, rho - c)  # radii fully covered by the bump
    r_lo = abs(c - rho)
    r_hi = c + rho

    def half_angle(r):
        if c == 0.0:
            return math.pi if r <= rho else 0.0
        u = (r * r + c * c - rho * rho) / (2.0 * r * c)
        return math.acos(min(1.0, max(-1.0, u)))

    for m in range(m_max + 1):
        out[m] = {}
        for P in powers:
            total = 0.0
            if m == 0 and r_full > 0:
                upper = min(1.0, r_full)
                total += 2.0 * math.pi * upper ** (P + 1) / (P + 1)
            a, b = max(r_lo, 0.0), min(r_hi, 1.0)
            if b > a and c > 0.0:
                if m == 0:
                    fn = lambda r: (r**P) * 2.0 * half_angle(r)
                else:
                    fn = lambda r: (r**P) * 2.0 * math.sin(m * half_angle(r)) / m
                val, _ = quad(fn, a, b, limit=300, epsabs=epsabs, epsrel=1e-12)
                total += val
            out[m][P] = total
    return out


def _gram_diskbump(bump: DiskBump, n: int, chi: float, epsabs: float = 1e-13) -> np.ndarray:
    c = abs(bump.center)
    phase = np.angle(bump.center) if c > 0 else 0.0
    if c + bump.radius >= 1.0:
        raise ValueError("bump must be compactly supported inside the unit disk")
    powers = sorted({j + k + 1 for j in range(n) for k in range(n)})
    arcs = _bump_angular_integrals(c, bump.radius, n - 1, powers, epsabs)
    factor = math.expm1(-2.0 * (n + chi) * bump.height)
    G = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(j, n):
            m = k - j
            P = j + k + 1
            val = factor * arcs[m][P]
            if j == k:
                val += 2.0 * math.pi / (P + 1)
            G[j, k] = val * np.exp(1j * m * phase)
            G[k, j] = np.conj(G[j, k])
    return G


def _gram_tensor_gl(V: Callable, n: int, chi: float, orders: Tuple[int, int]) -> np.ndarray:
    nr, nt = orders
    xr, wr = np.polynomial.legendre.leggauss(nr)
    r = 0.5 * (xr + 1.0)
    wr = 0.5 * wr
    xt, wt = np.polynomial.legendre.leggauss(nt)
    t = math.pi * (xt + 1.0)
    wt = math.pi * wt
    G = np.zeros((n, n), dtype=complex)
    two_n_chi = 2.0 * (n + chi)
    ks = np.arange(n)
    for i, (ri, wi) in enumerate(zip(r, wr)):
        z = ri * np.exp(1j * t)
        wgt = wi * wt * ri * np.exp(-two_n_chi * np.asarray(V(z), dtype=float))
        M = z[:, None] ** ks[None, :]
        G += (M * wgt[:, None]).conj().T @ M
    return G


def nonradial_kernel(V: Union[Callable, DiskBump], n: int, chi: float,
                     quadrature: Tuple[int, int] = (400, 400)) -> NonRadialKernel:
    """Finite-n kernel for a non-radial potential on the unit disk.

    V >= 0 must vanish outside a compact subset of the open disk;
    n <= 200 (dense Gram path).  Constant disk bumps are integrated exactly;
    arbitrary callables use tensor Gauss-Legendre at the given orders.
    """
    if n > 200:
        raise ValueError("dense Gram path limited to n <= 200")
    if isinstance(V, DiskBump):
        G = _gram_diskbump(V, n, chi)
    else:
        G = _gram_tensor_gl(V, n, chi, quadrature)
    return NonRadialKernel(G, n, chi)
