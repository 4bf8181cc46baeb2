"""Closed-form limiting CDFs for the rescaled extreme particle of each gas.

Every law is a distribution on the real line; infinite products are summed
in log space and stopped once the running term's deficit drops below 1e-16,
after which an analytic bound on the remaining tail is recorded.  The
incomplete-gamma building block is computed to relative accuracy 1e-12 with
the classic series / continued-fraction split at x = s + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

__all__ = [
    "LimitLaw",
    "annulus_law",
    "cdf_max",
    "finite_particles_law",
    "gumbel_strong_law",
    "gumbel_weak_law",
    "hard_exponential_law",
    "infinite_particles_law",
    "radial_gap_probability",
    "solve_eps_chi",
    "solve_eps_n",
    "upper_incomplete_gamma",
    "very_weak_law",
]

_EPS = 1e-16
_MAXIT = 10_000


def _gamma_p_series(s: float, x: float) -> float:
    """Regularized lower incomplete gamma P(s,x) by power series (x < s+1)."""
    if x == 0.0:
        return 0.0
    ap = s
    term = 1.0 / s
    total = term
    for _ in range(_MAXIT):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    else:
        raise RuntimeError("incomplete gamma series did not converge")
    return total * math.exp(-x + s * math.log(x) - math.lgamma(s))


def _gamma_q_contfrac(s: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(s,x) by continued fraction (x >= s+1)."""
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAXIT):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    else:
        raise RuntimeError("incomplete gamma continued fraction did not converge")
    return h * math.exp(-x + s * math.log(x) - math.lgamma(s))


def regularized_upper_gamma(s: float, x: float) -> float:
    """Q(s, x) = Gamma(s, x) / Gamma(s), relative accuracy 1e-12."""
    if s <= 0.0:
        raise ValueError("need s > 0")
    if x < 0.0:
        raise ValueError("need x >= 0")
    if x == 0.0:
        return 1.0
    if x == math.inf:
        return 0.0
    if x < s + 1.0:
        return 1.0 - _gamma_p_series(s, x)
    return _gamma_q_contfrac(s, x)


def upper_incomplete_gamma(s: float, x: float) -> float:
    """Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt."""
    return regularized_upper_gamma(s, x) * math.exp(math.lgamma(s))


def solve_eps_n(q: float, n: int) -> float:
    """Unique eps > 0 with e^{2(q-1) n eps} * eps = 1, residual < 1e-12.

    Bisection on the strictly increasing map eps -> 2(q-1) n eps + log eps.
    """
    if q <= 1.0:
        raise ValueError("need q > 1")
    if n < 1:
        raise ValueError("need n >= 1")
    c = 2.0 * (q - 1.0) * n

    def g(e: float) -> float:
        return c * e + math.log(e)

    lo, hi = 1e-300, 1.0
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-17 * max(hi, 1e-30):
            break
    eps = 0.5 * (lo + hi)
    # one Newton polish on g (derivative c + 1/eps)
    eps -= g(eps) / (c + 1.0 / eps)
    return eps


def solve_eps_chi(chi: float) -> float:
    """Unique eps > 0 with e^{chi eps} * eps = 1, residual < 1e-12."""
    if chi <= 0.0:
        raise ValueError("need chi > 0")

    def g(e: float) -> float:
        return chi * e + math.log(e)

    lo, hi = 1e-300, max(1.0, 1.0 / chi + 1.0)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-17 * max(hi, 1e-30):
            break
    eps = 0.5 * (lo + hi)
    eps -= g(eps) / (chi + 1.0 / eps)
    return eps


def radial_gap_probability(tail_masses) -> float:
    """prod_k (1 - mass_k) in log space; exactly 0 if any mass is 1."""
    masses = np.asarray(tail_masses, dtype=float)
    if np.any((masses < 0.0) | (masses > 1.0)):
        raise ValueError("masses must lie in [0, 1]")
    if np.any(masses == 1.0):
        return 0.0
    return float(np.exp(np.sum(np.log1p(-masses))))


# ---------------------------------------------------------------------------
# law variants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitLaw:
    """Tagged closed-form limiting CDF of a rescaled extreme."""

    variant: str
    params: tuple

    def cdf(self, t):
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.array([_CDFS[self.variant](self.params, float(x))[0] for x in ts])
        return float(out[0]) if np.ndim(t) == 0 else out

    def cdf_with_bound(self, t: float) -> Tuple[float, float]:
        """(CDF value, certified bound on the truncation error)."""
        return _CDFS[self.variant](self.params, float(t))

    @property
    def support(self) -> Tuple[float, float]:
        return _SUPPORTS[self.variant](self.params)


def very_weak_law(R: float, chi: float) -> LimitLaw:
    if R < 1.0 or chi <= 0.0:
        raise ValueError("very_weak needs R >= 1 and chi > 0")
    return LimitLaw("very_weak", (R, chi))


def annulus_law(R: float, chi: float) -> LimitLaw:
    if R <= 1.0 or chi <= 0.0:
        raise ValueError("annulus needs R > 1 and chi > 0")
    return LimitLaw("annulus", (R, chi))


def finite_particles_law(alpha: float, chi: float, gamma: float,
                         l_plus: float, l_minus: float) -> LimitLaw:
    if alpha <= 0.0 or gamma <= 0.0 or chi <= 0.0:
        raise ValueError("finite_particles needs alpha, gamma, chi > 0")
    if alpha < 2.0 * chi:
        raise ValueError("finite_particles needs alpha >= 2 chi")
    if l_plus <= 0.0 or l_minus < 1.0:
        raise ValueError("finite_particles needs l_plus > 0 and l_minus >= 1")
    return LimitLaw("finite_particles", (alpha, chi, gamma, l_plus, l_minus))


def infinite_particles_law(alpha: float, chi: float, gamma: float) -> LimitLaw:
    if alpha <= 0.0 or gamma <= 0.0 or chi <= 0.0:
        raise ValueError("infinite_particles needs alpha, gamma, chi > 0")
    return LimitLaw("infinite_particles", (alpha, chi, gamma))


def gumbel_strong_law(q: float, q_tilde: Optional[float] = None) -> LimitLaw:
    if q <= 1.0:
        raise ValueError("gumbel_strong needs q > 1")
    if q_tilde is not None and q_tilde < 0.0:
        raise ValueError("q_tilde must be nonnegative")
    return LimitLaw("gumbel_strong", (q, q_tilde))


def hard_exponential_law() -> LimitLaw:
    return LimitLaw("hard_exponential", ())


def gumbel_weak_law(chi: float) -> LimitLaw:
    if chi <= 0.0:
        raise ValueError("gumbel_weak needs chi > 0")
    return LimitLaw("gumbel_weak", (chi,))


def cdf_max(law: LimitLaw, t) -> float:
    """CDF of the law at t (vectorized over arrays)."""
    return law.cdf(t)


# -- implementations --------------------------------------------------------


def _product_one_minus_geometric(x0: float, ratio: float) -> Tuple[float, float]:
    """(log prod_k (1 - x0 ratio^k), tail bound on the dropped -log terms).

    Terms are consumed in vectorized blocks; once a quick count of the
    factors below 1/2 shows the log-product is under -745 the value
    underflows double precision and 0 is returned immediately.
    """
    if x0 >= 1.0:
        return -math.inf, 0.0
    if ratio > 0.0 and x0 > 0.5:
        n_half = (math.log(x0) - math.log(0.5)) / -math.log(ratio)
        if n_half * math.log(2.0) > 745.0:
            return -math.inf, 0.0
    log_sum = 0.0
    block = 4096
    k0 = 0
    log_x0 = math.log(x0) if x0 > 0 else -math.inf
    log_r = math.log(ratio) if ratio > 0 else -math.inf
    while True:
        ks = np.arange(k0, k0 + block, dtype=float)
        x = np.exp(log_x0 + ks * log_r)
        log_sum += float(np.sum(np.log1p(-x)))
        if log_sum < -745.0:
            return -math.inf, 0.0
        x_next = math.exp(log_x0 + (k0 + block) * log_r)
        if x_next < _EPS:
            bound = x_next / ((1.0 - ratio) * (1.0 - x_next))
            return log_sum, bound
        k0 += block
        if k0 > 100 * _MAXIT:
            raise RuntimeError("geometric product did not converge")


def _cdf_very_weak(params, t: float) -> Tuple[float, float]:
    R, chi = params
    if t <= R:
        return 0.0, 0.0
    rho = (R / t) ** 2
    x0 = (R / t) ** (2.0 * chi)
    log_p, bound = _product_one_minus_geometric(x0, rho)
    val = math.exp(log_p)
    return val, val * bound if math.isfinite(bound) else 0.0


def _cdf_annulus(params, t: float) -> Tuple[float, float]:
    R, chi = params
    if t <= 1.0:
        return 0.0, 0.0
    if t >= R:
        return 1.0, 0.0
    # factors below 1/2 force underflow once there are enough of them
    n_half = (math.log(2.0) / (2.0 * math.log(t)) - chi) / 1.0
    if n_half * math.log(2.0) > 900.0:
        return 0.0, 0.0
    log_sum = 0.0
    block = 4096
    k0 = 0
    while True:
        e = 2.0 * np.arange(k0, k0 + block, dtype=float) + 2.0 * chi
        xt = np.exp(-e * math.log(t))
        xR = np.exp(-e * math.log(R))
        log_sum += float(np.sum(np.log1p(-xt) - np.log1p(-xR)))
        if log_sum < -745.0:
            return 0.0, 0.0
        e_next = 2.0 * (k0 + block) + 2.0 * chi
        xt_next = t ** (-e_next)
        if xt_next < _EPS:
            tail = xt_next / ((1.0 - t ** -2.0) * (1.0 - xt_next))
            val = math.exp(log_sum)
            return val, val * tail
        k0 += block
        if k0 > 100 * _MAXIT:
            raise RuntimeError("annulus product did not converge")


def _cdf_finite_particles(params, t: float) -> Tuple[float, float]:
    alpha, chi, gamma, l_plus, l_minus = params
    if t <= 0.0:
        return 0.0, 0.0
    x = 2.0 * gamma * t ** (-alpha)
    n_half = alpha / 2.0 - chi
    is_integer = abs(n_half - round(n_half)) < 1e-9
    if is_integer:
        upto = int(round(n_half)) - 1
    else:
        upto = math.floor(n_half)
    log_p = 0.0
    for k in range(0, upto + 1):
        s = (2.0 * k + 2.0 * chi) / alpha
        q = regularized_upper_gamma(s, x)
        if q == 0.0:
            return 0.0, 0.0
        log_p += math.log(q)
    if is_integer:
        w = (1.0 / l_plus + 1.0 / l_minus) / (
            1.0 / (alpha * gamma) + 1.0 / l_plus + 1.0 / l_minus
        )
        bracket = math.exp(-x) + (-math.expm1(-x)) * w
        log_p += math.log(bracket)
    return math.exp(log_p), 0.0


def _cdf_infinite_particles(params, t: float) -> Tuple[float, float]:
    alpha, chi, gamma = params
    if t <= 0.0:
        return 0.0, 0.0
    x = 2.0 * gamma * t ** (-alpha)
    log_p = 0.0
    k = 0
    while True:
        s = (2.0 * k + 2.0 * chi) / alpha
        # deficit 1 - Q(s,x) = P(s,x) <= x^s / (s Gamma(s))
        log_def_bound = s * math.log(x) - math.log(s) - math.lgamma(s)
        if log_def_bound < math.log(_EPS):
            break
        q = regularized_upper_gamma(s, x)
        if q == 0.0:
            return 0.0, 0.0
        log_p += math.log(q)
        k += 1
        if k > _MAXIT:
            raise RuntimeError("infinite-particle product did not converge")
    # dropped deficits fall faster than geometrically with ratio <= 1/2 once
    # x^{2/alpha} / s < 1/2; bound the tail by twice the first dropped bound
    tail = 2.0 * math.exp(log_def_bound)
    val = math.exp(log_p)
    return val, val * tail


def _cdf_gumbel_strong(params, a: float) -> Tuple[float, float]:
    q, q_tilde = params
    rate = math.exp(-2.0 * (q - 1.0) * a)
    if q_tilde is None:
        coeff = 1.0 / (2.0 * q)
    else:
        coeff = 0.5 * (q_tilde + 1.0) / (q_tilde + q)
    return math.exp(-coeff * rate), 0.0


def _cdf_hard_exponential(params, t: float) -> Tuple[float, float]:
    if t <= 0.0:
        return 0.0, 0.0
    return -math.expm1(-t), 0.0


def _cdf_gumbel_weak(params, a: float) -> Tuple[float, float]:
    (chi,) = params
    eps = solve_eps_chi(chi)
    t = 1.0 + eps / 2.0 + a / (2.0 * chi)
    return _cdf_very_weak((1.0, chi), t)


_CDFS = {
    "very_weak": _cdf_very_weak,
    "annulus": _cdf_annulus,
    "finite_particles": _cdf_finite_particles,
    "infinite_particles": _cdf_infinite_particles,
    "gumbel_strong": _cdf_gumbel_strong,
    "hard_exponential": _cdf_hard_exponential,
    "gumbel_weak": _cdf_gumbel_weak,
}

_SUPPORTS = {
    "very_weak": lambda p: (p[0], math.inf),
    "annulus": lambda p: (1.0, p[0]),
    "finite_particles": lambda p: (0.0, math.inf),
    "infinite_particles": lambda p: (0.0, math.inf),
    "gumbel_strong": lambda p: (-math.inf, math.inf),
    "hard_exponential": lambda p: (0.0, math.inf),
    "gumbel_weak": lambda p: (-math.inf, math.inf),
}
