import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "ffsn.kernels._recurrent",
        ["src/ffsn/kernels/_recurrent.pyx", "src/ffsn/kernels/_gates.c"],
        include_dirs=[np.get_include(), "src/ffsn/kernels"],
        # errno/trap guarantees would block auto-vectorizing the gate
        # loops; neither is relied on (results stay IEEE per element)
        extra_compile_args=["-O3", "-fno-math-errno", "-fno-trapping-math"],
    ),
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "embedsignature": True,
        },
    ),
)
