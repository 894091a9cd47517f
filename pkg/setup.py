"""Build script: compiles the path-simulation kernel extension when possible.

The extension is optional. If Cython or a C compiler is unavailable the
install proceeds and the package falls back to the pure numpy kernels at
import time (see longrates._backend).
"""

import sys

from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "longrates._kernels",
                ["src/longrates/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"longrates: skipping compiled kernels ({exc}); "
          "the pure-Python backend will be used", file=sys.stderr)
    ext_modules = []

setup(ext_modules=ext_modules)
