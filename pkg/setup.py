"""Build script: compiles the optional Cython root-finding core.

The package works without the extension (a vectorized numpy fallback is
selected at import time); building it makes the Kac-polynomial experiments
several times faster.  Set COULOMBGAS_NO_EXT=1 to skip compilation.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("COULOMBGAS_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "coulombgas._roots_fast",
                    ["src/coulombgas/_roots_fast.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
