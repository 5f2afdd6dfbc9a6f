"""Build script for the optional compiled scan kernel.

The package works without the extension: u8tok.kernels falls back to the
pure-Python implementation when u8tok._scan is absent.
"""

from setuptools import setup
from setuptools.extension import Extension

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [Extension("u8tok._scan", ["src/u8tok/_scan.pyx"])],
        language_level="3",
    )

setup(ext_modules=ext_modules)
