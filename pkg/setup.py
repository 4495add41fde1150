import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("WC4DVAR_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "wc4dvar._l96_kernels",
                sources=["src/wc4dvar/_l96_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,  # fall back to the numpy kernels if the build fails
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
