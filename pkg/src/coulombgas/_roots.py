"""Root-iteration backend selection: compiled core if built, numpy otherwise.

Set COULOMBGAS_PURE=1 to force the numpy fallback (used by the benchmark and
by tests that compare the two backends).
"""

from __future__ import annotations

import os

from . import _roots_numpy

if os.environ.get("COULOMBGAS_PURE"):
    _impl = _roots_numpy
else:
    try:
        from . import _roots_fast as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _roots_numpy

BACKEND = _impl.BACKEND
aberth = _impl.aberth
aberth_numpy = _roots_numpy.aberth
