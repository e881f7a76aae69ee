import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# No -ffast-math: the double-double kernels depend on exact IEEE rounding and
# on the compiler never fusing multiply-adds.
extensions = [
    Extension(
        "opinet._kernels",
        ["src/opinet/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O2", "-ffp-contract=off", "-fno-fast-math"],
        optional=True,
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
