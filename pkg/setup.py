import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "augdual._kernels._jacobi",
                ["src/augdual/_kernels/_jacobi.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # No Cython available: install pure-Python only; the package falls back
    # to the numpy kernel at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
