from __future__ import annotations

import os

from setuptools import Extension, setup


def build_ext_modules():
    """Cythonize the similarity/correlation kernels.

    The extension is optional: when Cython (or a C compiler) is unavailable
    the package falls back to the pure-Python kernels at import time, so an
    empty list here still yields a working install.
    """
    if os.environ.get("RESUME_SCREEN_SKIP_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "resume_screen._kernels._ckernels",
        sources=[os.path.join("src", "resume_screen", "_kernels", "_ckernels.pyx")],
        extra_compile_args=["-O3"],
        language="c",
    )
    return cythonize([ext], language_level=3)


if __name__ == "__main__":
    # Also allows `python setup.py build_ext --inplace` locally.
    setup(ext_modules=build_ext_modules())
