"""Build the optional compiled run-loop kernel.

If Cython or a C++ compiler is missing the package still installs and falls
back to the pure-Python loop.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - depends on toolchain
            print(f"warning: compiled kernel not built ({exc}); using pure-Python loop")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover
            print(f"warning: failed to build {ext.name} ({exc}); using pure-Python loop")


def extensions():
    if os.environ.get("CROWDCAP_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "crowdcap._kernel",
        ["src/crowdcap/_kernel.pyx"],
        include_dirs=[np.get_include()],
        language="c++",
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    try:
        return cythonize([ext], compiler_directives={"language_level": "3"})
    except Exception as exc:  # pragma: no cover
        print(f"warning: cannot cythonize kernel ({exc}); using pure-Python loop")
        return []


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
