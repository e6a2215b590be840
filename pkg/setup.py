import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("UWZ_NO_EXTENSION"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "uwz._kernels._ckernels",
                    ["src/uwz/_kernels/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # pure-Python kernels are used when Cython/numpy are missing at build time
        ext_modules = []

setup(ext_modules=ext_modules)
