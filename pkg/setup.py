import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # fall back to the pure-Python kernel
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("AMPLIKIT_NO_EXT"):
    ext_modules = cythonize(
        [Extension("amplikit._ckernels", ["src/amplikit/_ckernels.pyx"])],
        compiler_directives={"language_level": 3, "embedsignature": True},
    )

setup(ext_modules=ext_modules)
