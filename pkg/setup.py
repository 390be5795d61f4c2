"""Builds the optional Cython kernel for constraint residual/gradient evaluation.

The package works without it: geomloop.constraints falls back to the pure
numpy/Python kernel when the extension is absent (or GEOMLOOP_PURE=1).
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:
    np = None
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "geomloop.constraints._speedups",
                ["src/geomloop/constraints/_speedups.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
