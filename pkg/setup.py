"""Build script for the compiled neighbor-search kernel.

The package works without the extension (a pure numpy/scipy fallback is
selected at import time), so failure to compile is not fatal for
functionality, only for speed.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - build environment without Cython
    cythonize = None

extensions = [
    Extension(
        "causnet._kernels._native",
        ["src/causnet/_kernels/_native.pyx"],
        extra_compile_args=["-O3"],
    )
]

if cythonize is not None:
    ext_modules = cythonize(extensions, language_level="3")
else:
    ext_modules = []

setup(ext_modules=ext_modules)
