"""Build script: compiles the Monte Carlo weight kernel when Cython and a C
compiler are available.  The package falls back to the NumPy implementation
of the same kernels if the extension is missing, so a pure-Python install
still works."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "qutrit_assign._weights_cy",
                ["src/qutrit_assign/_weights_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )

setup(ext_modules=ext_modules)
