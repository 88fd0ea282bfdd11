import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# -ffast-math lets gcc vectorize exp/tanh through glibc's libmvec (5-10x on the
# softmax, cross-entropy and GELU loops). Non-finite inputs still propagate the
# same way as in the numpy fallback; tests/test_kernels.py pins that down.
# PARACONTROL_PORTABLE=1 drops -march=native for binaries that move between machines.
flags = ["-O3", "-ffast-math"]
if os.environ.get("PARACONTROL_PORTABLE", "") in ("", "0"):
    flags.append("-march=native")

extensions = [
    Extension(
        "paracontrol._kernels",
        ["src/paracontrol/_kernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=flags,
        libraries=["mvec", "m"],
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))
