import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "gprlab.sim._fdtd_core",
                ["src/gprlab/sim/_fdtd_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

# The compiled kernel is a speedup, not a requirement: gprlab.sim falls back
# to the NumPy implementation when the extension is missing.
for ext in ext_modules:
    ext.optional = True

setup(ext_modules=ext_modules)
