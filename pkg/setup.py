from setuptools import Extension, setup

import numpy as np

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "rankcascade._kernels",
                ["src/rankcascade/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except ImportError:
    # Without Cython the package still works on the pure NumPy backend.
    extensions = []

setup(ext_modules=extensions)
