from setuptools import setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(["src/outflowlab/_kernels.pyx"], language_level=3)
    for ext in ext_modules:
        ext.extra_compile_args = ["-O3"]
        # the compiled module is an accelerator; a failed build falls back to numpy
        ext.optional = True

setup(ext_modules=ext_modules)
