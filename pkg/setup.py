"""Build shim: compile the optional Cython kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed cythonize/compile must not fail the install.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/setorder/_kernels/_fast.pyx",
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
except Exception as exc:  # pragma: no cover - exercised only on broken toolchains
    import sys

    print(f"setorder: skipping compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
