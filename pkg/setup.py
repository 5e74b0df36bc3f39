"""Build script: compiles the CVaR kernel extension when a toolchain is present.

The extension is optional. If Cython or a C compiler is missing (or
CVARLEARN_NO_EXT=1 is set), the package installs pure-Python and selects the
NumPy kernel backend at import time.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Let the install continue if the extension fails to compile."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, broken headers, ...
            print(f"warning: skipping compiled kernels ({exc}); "
                  "falling back to pure-Python backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); "
                  "falling back to pure-Python backend")


ext_modules = []
if os.environ.get("CVARLEARN_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "cvarlearn._kernels",
                    sources=["src/cvarlearn/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
