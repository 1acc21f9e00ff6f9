from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "b92sec._gridcore",
                ["src/b92sec/_gridcore.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
    # the package works without the extension (pure-numpy fallback)
    for ext in ext_modules:
        ext.optional = True

setup(ext_modules=ext_modules)
