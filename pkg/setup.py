"""Build script: compiles the geodesic development kernel when Cython is
available, otherwise the package falls back to the pure-Python kernel."""

import os

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    if not os.path.exists("src/hyperpoly/_trace_cy.pyx"):
        raise ImportError
    ext_modules = cythonize(
        [Extension(
            "hyperpoly._trace_cy",
            ["src/hyperpoly/_trace_cy.pyx"],
            # no FMA contraction: the compiled kernel must reproduce the
            # pure-Python kernel bit for bit
            extra_compile_args=["-O2", "-ffp-contract=off"],
        )],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
