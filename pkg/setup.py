"""Build script: compiles the Monte Carlo kernel extension when possible.

Set ECODIV_SKIP_EXT=1 to force a pure-Python install (the simulator then
runs on the interpreted kernel, which is bit-identical but much slower).
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("ECODIV_SKIP_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "ecodiv.survival._mc_cy",
                    ["src/ecodiv/survival/_mc_cy.pyx"],
                    # -ffp-contract=off keeps double arithmetic identical to
                    # CPython's, which the cross-kernel determinism contract
                    # relies on.
                    extra_compile_args=["-O3", "-ffp-contract=off", "-fno-fast-math"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
