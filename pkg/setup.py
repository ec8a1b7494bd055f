import os

from setuptools import Extension, setup

# The compiled pivot kernel is optional: ucdispatch.simplex falls back to the
# NumPy implementation when the extension is absent.  Set UCDISPATCH_NO_EXT=1
# to skip compilation entirely.  -ffp-contract=off keeps the C kernel's
# floating-point results identical to the NumPy fallback (no FMA fusion).
ext_modules = []
if os.environ.get("UCDISPATCH_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "ucdispatch._simplex_core",
                    ["src/ucdispatch/_simplex_core.pyx"],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
