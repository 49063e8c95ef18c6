"""Build script: compiles the optional speedup extension.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time); any failure to cythonize or compile
downgrades to a pure-Python install instead of aborting.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/eqfree/_ckernels.pyx"],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - depends on build host
    print(f"eqfree: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
