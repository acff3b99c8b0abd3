from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None:
    extensions = cythonize(
        [Extension("hetda._speedups", ["src/hetda/_speedups.pyx"])],
        language_level=3,
    )

# The extension is optional: hetda falls back to the pure-Python kernels
# when hetda._speedups is not importable.
setup(ext_modules=extensions)
