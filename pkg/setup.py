"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); the build therefore degrades gracefully when
Cython or a C compiler is unavailable, or when XSB_LAB_NO_EXTENSION is set.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("XSB_LAB_NO_EXTENSION"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
        import numpy as np

        ext = Extension(
            "xsblab._kernels._cykernels",
            sources=["src/xsblab/_kernels/_cykernels.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
        ext_modules = cythonize([ext], language_level=3)
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
