from setuptools import Extension, setup

# The compiled kernel is optional: qlq falls back to a pure-Python
# implementation of the same routines when the extension is absent.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("qlq._kernel", ["src/qlq/_kernel.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
