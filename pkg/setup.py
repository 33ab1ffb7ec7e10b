"""Build script: compiles the optional Cython stepping kernel.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any failure here degrades to a pure-Python build
instead of aborting the install.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/kgzlab/_kernels/_core.pyx",
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False, "cdivision": True},
    )
    # -ffp-contract=off keeps the C arithmetic bit-identical to the numpy
    # fallback (no FMA contraction); required for the backend-equality test.
    for ext in ext_modules:
        ext.extra_compile_args = ["-O3", "-ffp-contract=off"]
except Exception as exc:  # pragma: no cover - exercised only without Cython
    print(f"kgzlab: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
