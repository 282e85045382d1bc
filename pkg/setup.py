import os

import numpy as np
from setuptools import Extension, setup

# The compiled kernel is optional: without Cython (or with SQDMNP_NO_EXT=1)
# the package installs pure-Python and falls back at import time.
ext_modules = []
if not os.environ.get("SQDMNP_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "sqdmnp._kernels",
                    ["src/sqdmnp/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3", "-fcx-limited-range"],
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "embedsignature": True,
            },
        )

setup(ext_modules=ext_modules)
