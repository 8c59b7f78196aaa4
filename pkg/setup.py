"""Build script. Compiles the optional fast-kernel extension.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); set IRKIT_NO_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("IRKIT_NO_EXT") != "1" and os.path.exists("src/irkit/_ckernels.pyx"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        # -ffp-contract=off: no FMA contraction, so the extension reproduces
        # the NumPy fallback bit for bit.
        ext_modules = cythonize(
            [
                Extension(
                    "irkit._ckernels",
                    ["src/irkit/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
