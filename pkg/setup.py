"""Build glue for the compiled time-stepping kernel.

The package works without the extension (a numpy fallback is selected at
import time); building it makes long evolution runs several times faster.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "quadnls._kernels._midpoint",
                ["src/quadnls/_kernels/_midpoint.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
