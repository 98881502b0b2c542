"""Build glue for the C speed core.

Metadata lives in pyproject.toml; this file only declares the extension.
-ffp-contract=off keeps the Monte Carlo float path bit-identical to numpy
(no fused multiply-add in x*x + y*y).
"""

from setuptools import Extension, setup

setup(
    ext_modules=[
        Extension(
            "randen._speed",
            sources=["src/randen/_speed.c"],
            extra_compile_args=["-O3", "-std=c11", "-ffp-contract=off"],
        )
    ]
)
