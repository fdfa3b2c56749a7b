import os

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

# random_beta lives in numpy's static distribution libraries
_numpy_dir = os.path.dirname(numpy.__file__)
_random_lib = os.path.join(_numpy_dir, "random", "lib")
_math_lib = os.path.join(numpy.get_include(), "..", "lib")

setup(
    ext_modules=cythonize(
        [
            Extension(
                "stormflux.mc._ckernel",
                ["src/stormflux/mc/_ckernel.pyx"],
                include_dirs=[numpy.get_include()],
                library_dirs=[_random_lib, _math_lib],
                libraries=["npyrandom", "npymath", "m"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False},
    )
)
