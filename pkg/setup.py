"""Build script: compiles the tridiagonal-sweep kernel if Cython is usable.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so compilation failures are non-fatal.
"""

import numpy as np
from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/mhdlab/kernels/_tridiag.pyx"],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"skipping compiled kernels ({exc}); numpy fallback will be used")
    ext_modules = []

setup(
    ext_modules=ext_modules,
    include_dirs=[np.get_include()],
)
