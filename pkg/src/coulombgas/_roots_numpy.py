"""Pure-numpy Aberth-Ehrlich simultaneous root iteration (fallback backend).

Same contract as the compiled extension in _roots_fast: refine all roots of
one polynomial at once, returning (roots, iterations, converged).  The inner
loop is vectorized over the n current root estimates; cost per iteration is
one Horner pass over the coefficients plus an n x n pairwise-repulsion sum.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def aberth(coeffs: np.ndarray, z0: np.ndarray, maxiter: int = 500,
           tol: float = 1e-14):
    """Aberth-Ehrlich iteration for the roots of sum_k coeffs[k] z^k.

    coeffs are ascending (a_0 .. a_n, a_n != 0); z0 holds n initial guesses.
    Convergence is declared when every correction satisfies
    |delta_i| < tol * (1 + |z_i|).
    """
    c = np.ascontiguousarray(coeffs, dtype=complex)
    z = np.array(z0, dtype=complex)
    n = z.size
    if c.shape[0] != n + 1:
        raise ValueError("need len(coeffs) == len(z0) + 1")
    dc = c[1:] * np.arange(1, n + 1)
    for it in range(1, maxiter + 1):
        p = np.full(n, c[-1], dtype=complex)
        for k in range(n - 1, -1, -1):
            p = p * z + c[k]
        dp = np.full(n, dc[-1], dtype=complex)
        for k in range(n - 2, -1, -1):
            dp = dp * z + dc[k]
        # Newton correction; dead-flat derivative gets a tiny nudge
        bad = dp == 0
        if np.any(bad):
            dp = np.where(bad, 1e-300, dp)
        w = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        denom = 1.0 - w * s
        denom = np.where(denom == 0, 1e-300, denom)
        delta = w / denom
        z = z - delta
        if np.all(np.abs(delta) < tol * (1.0 + np.abs(z))):
            return z, it, True
    return z, maxiter, False
