"""Build script; compiles the optional Cython kernel when Cython is present.

Without Cython (or a compiler) the package installs pure Python and the
runtime falls back to resolvekit._pykernel.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("RESOLVEKIT_PURE"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        extensions = [Extension("resolvekit._ckernel", ["src/resolvekit/_ckernel.pyx"])]
        ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})

setup(ext_modules=ext_modules)
