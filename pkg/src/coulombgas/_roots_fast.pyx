# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Aberth-Ehrlich simultaneous root iteration (hot kernel).

One polynomial per call; the O(n^2)-per-iteration inner loops run without
the GIL so replica batches can be driven from a thread pool.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def aberth(coeffs, z0, int maxiter=500, double tol=1e-14):
    """Same contract as coulombgas._roots_numpy.aberth."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] z = np.array(z0, dtype=np.complex128)
    cdef Py_ssize_t n = z.shape[0]
    if c.shape[0] != n + 1:
        raise ValueError("need len(coeffs) == len(z0) + 1")
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] dc = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t k
    for k in range(n):
        dc[k] = c[k + 1] * (k + 1)

    cdef double complex[::1] cv = c
    cdef double complex[::1] dcv = dc
    cdef double complex[::1] zv = z
    cdef Py_ssize_t it, i, j
    cdef double complex p, dp, w, s, denom, delta, zi
    cdef double move, scale
    cdef bint converged = 0
    cdef int iters = maxiter

    with nogil:
        for it in range(1, maxiter + 1):
            move = 0.0
            for i in range(n):
                zi = zv[i]
                p = cv[n]
                for k in range(n - 1, -1, -1):
                    p = p * zi + cv[k]
                dp = dcv[n - 1]
                for k in range(n - 2, -1, -1):
                    dp = dp * zi + dcv[k]
                if dp == 0:
                    dp = 1e-300
                w = p / dp
                s = 0
                for j in range(n):
                    if j != i:
                        s = s + 1.0 / (zi - zv[j])
                denom = 1.0 - w * s
                if denom == 0:
                    denom = 1e-300
                delta = w / denom
                zv[i] = zi - delta
                scale = tol * (1.0 + abs(zv[i]))
                if abs(delta) >= scale and abs(delta) / scale > move:
                    move = abs(delta) / scale
            if move == 0.0:
                converged = 1
                iters = it
                break

    return z, iters, bool(converged)
