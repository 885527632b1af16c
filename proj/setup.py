from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "occulstm._core",
    sources=[
        "src/dataio.cpp",
        "src/encoding.cpp",
        "src/model.cpp",
        "src/train.cpp",
        "src/eval.cpp",
        "src/synth.cpp",
        "src/plot.cpp",
        "src/cli.cpp",
        "bindings/py_core.cpp",
    ],
    include_dirs=["include"],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
