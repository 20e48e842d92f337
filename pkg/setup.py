from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    # optional=True: a failed compile leaves the pure-Python kernels in charge.
    ext_modules = cythonize(
        [
            Extension(
                "chatpulse._kernels._native",
                ["src/chatpulse/_kernels/_native.pyx"],
                optional=True,
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
