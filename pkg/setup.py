"""Build script for the optional compiled kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), so the extension is marked optional: a failed build degrades
to the pure-Python backend instead of failing the install.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "slbfgs._kernels._fast",
                ["src/slbfgs/_kernels/_fast.pyx"],
                # -ffp-contract=off: keep multiply-add unfused so the compiled
                # kernels execute the same IEEE operation sequence as the
                # NumPy fallback.
                extra_compile_args=["-O3", "-ffp-contract=off"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )
else:
    extensions = []

setup(ext_modules=extensions)
