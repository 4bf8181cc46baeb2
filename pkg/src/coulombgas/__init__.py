"""Numerical laboratory for 2-D radial determinantal Coulomb gases.

The package samples the moduli of radial beta=2 Coulomb gases through the
Kostlan radial decomposition, evaluates finite-n and limiting reproducing
kernels at the origin and at the unit circle, provides the closed-form
limiting laws of rescaled extreme particles (Gumbel, exponential,
incomplete-gamma products, infinite q-products), and cross-checks them by
seeded Monte Carlo and deterministic convergence experiments.  A companion
set of tools handles Kac random polynomials: coefficient sampling,
certified simultaneous root finding, and inner/outer/edge zero statistics.
"""

__version__ = "0.1.0"

from . import kac, kernels, kostlan, limit_laws, potentials, stats  # noqa: F401
