"""Build script for the optional compiled search kernel.

The kernel is skipped (and the pure-Python search used instead) when Cython
or a C compiler is unavailable, or when FO2T_NO_EXT=1 is set.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("FO2T_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "fo2t.model_finder._search_cy",
                    ["src/fo2t/model_finder/_search_cy.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
