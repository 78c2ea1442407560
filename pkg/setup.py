"""Build script: compiles the optional tokenizer kernel.

The compiled extension is a pure speedup; if Cython or a C compiler is
unavailable the package installs without it and the pure-Python twin is
used at import time.
"""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/toxishield/_wordpiece.pyx"],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
