"""Builds the optional compiled kernels.

The package works without the extension (a numpy fallback is selected at
import time), so a missing C toolchain only costs speed, not correctness.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    # -ffp-contract=off keeps the compiled arithmetic bit-identical to the
    # numpy fallback (no fused multiply-add in the update recursions).
    extensions = cythonize(
        [
            Extension(
                "lagrelax._core",
                ["src/lagrelax/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
