"""Build script: compiles the optional Cython kernel core.

If Cython or a C compiler is unavailable the package still installs and
falls back to the pure-numpy kernels at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/stabsim/kernels/_corecy.pyx",
        compiler_directives={"language_level": "3"},
    )
    for ext in ext_modules:
        ext.extra_compile_args = ["-O3"]
except Exception as exc:  # pragma: no cover - build-env dependent
    print(f"stabsim: skipping compiled kernels ({exc}); pure-python fallback will be used")

setup(ext_modules=ext_modules)
