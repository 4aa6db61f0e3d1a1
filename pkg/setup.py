from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    ext_modules = cythonize(
        [Extension("hyperifs._core._kernels",
                   ["src/hyperifs/_core/_kernels.pyx"])],
        language_level="3",
    )
except ImportError:
    # pure-python fallback is selected at import time
    ext_modules = []

setup(ext_modules=ext_modules)
