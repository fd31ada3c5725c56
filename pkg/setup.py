from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "privmetrics._kernels._core",
                ["src/privmetrics/_kernels/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Pure install; the package falls back to the NumPy kernels at import.
    ext_modules = []

setup(ext_modules=ext_modules)
