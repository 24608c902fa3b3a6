import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ASMLAB_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "asmlab._jacobi_cy",
                    sources=["src/asmlab/_jacobi_cy.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # No Cython: install pure-python only; the package falls back at import.
        ext_modules = []

setup(ext_modules=ext_modules)
