"""Build the _pmjp extension by delegating to the project's CMake build."""

import subprocess
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

ROOT = Path(__file__).resolve().parent


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        out_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)
        subprocess.run(
            [
                "cmake",
                "-S", str(ROOT),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DPMJP_BUILD_TESTS=OFF",
                "-DPMJP_BUILD_PYTHON=ON",
                f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={out_dir}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_pmjp",
             "--parallel"],
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("pmjp._pmjp")],
    cmdclass={"build_ext": CMakeBuild},
)
