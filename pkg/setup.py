"""Builds the optional compiled kernels; the package works without them."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("ENDOTRIVIAL_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
        from numpy import get_include
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "endotrivial._kernels",
                    sources=["src/endotrivial/_kernels.pyx"],
                    include_dirs=[get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
