from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    # optional=True: a failed compile falls back to the pure-Python kernels
    ext_modules = cythonize(
        [
            Extension(
                "ventriq._ckernels",
                ["src/ventriq/_ckernels.pyx"],
                optional=True,
            )
        ]
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
