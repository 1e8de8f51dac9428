"""Build script for the optional compiled kernel extension.

The package is pure Python apart from conjparse/kernels/_lstm_ops.pyx.
If Cython or a C compiler is unavailable the build falls back to the
numpy kernel implementation; everything still works, just slower.
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler: keep the pure build
            warnings.warn(f"skipping compiled kernels ({exc}); "
                          "falling back to the pure-numpy backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"skipping {ext.name} ({exc}); "
                          "falling back to the pure-numpy backend")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython not available; building without compiled kernels")
        return []
    from setuptools import Extension

    return cythonize(
        [
            Extension(
                "conjparse.kernels._lstm_ops",
                ["src/conjparse/kernels/_lstm_ops.pyx"],
            )
        ],
        language_level=3,
    )


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
