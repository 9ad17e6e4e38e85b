from setuptools import Extension, setup

# The compiled scan kernel is optional: without Cython (or a C compiler)
# the package installs pure-Python and superres.kernels falls back to the
# numpy implementation at import time.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "superres.kernels.cyscan",
                ["src/superres/kernels/cyscan.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
