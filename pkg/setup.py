"""Build script for the compiled basis-evaluation kernels.

The extension is optional at runtime: pospoly.kernels falls back to the
pure-numpy implementation when the compiled module is missing.
-ffp-contract=off keeps the compiled kernels bit-identical to the fallback.
"""
import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "pospoly._fastkernels",
        sources=["src/pospoly/_fastkernels.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
