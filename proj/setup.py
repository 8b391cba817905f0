import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

eigen_include = os.environ.get("EIGEN3_INCLUDE_DIR", "/usr/include/eigen3")

ext = Pybind11Extension(
    "nvpol._nvpol",
    sources=[
        "src/environment.cpp",
        "src/dynamics.cpp",
        "src/oracle.cpp",
        "src/estimator.cpp",
        "src/config.cpp",
        "src/validate.cpp",
        "bindings/pymodule.cpp",
    ],
    include_dirs=["include", "vendor", eigen_include],
    cxx_std=20,
)

setup(
    ext_modules=[ext],
    cmdclass={"build_ext": build_ext},
)
