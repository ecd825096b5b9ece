"""Builds the optional compiled kernels.  Without Cython or a C compiler
the package installs pure Python and uses ``anglican._kernels``."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("ANGLICAN_PURE_PYTHON", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("anglican._ckernels", ["src/anglican/_ckernels.pyx"],
                       extra_compile_args=["-O2"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
