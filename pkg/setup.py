"""Build script: compiles the optional Cython kinematics kernels.

The package works without the extension (NumPy fallback is selected at
import time), so compilation failures are downgraded to a warning.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/wbteleop/kern/cy_backend.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    warnings.warn(f"Cython kernels not built, using NumPy fallback: {exc}")

setup(ext_modules=ext_modules)
