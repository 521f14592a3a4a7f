from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:  # pure-python install; kernels.py falls back to numpy
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("bsppcc._kernel", ["src/bsppcc/_kernel.pyx"],
                   include_dirs=[np.get_include()])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
