import os

from setuptools import Extension, setup

# The compiled kernel is optional: without it the package falls back to the
# pure-Python duel loop (same results, much slower). Set DUELNEAT_PURE=1 to
# skip compilation on purpose.
ext_modules = []
if not os.environ.get("DUELNEAT_PURE"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "duelneat._speed",
                    ["src/duelneat/_speed.pyx"],
                    # -ffp-contract=off keeps C arithmetic bit-identical to
                    # CPython floats (no FMA contraction).
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
