from os.path import join
import logging
import io
from setuptools import setup, find_packages

package_name = "modal_security_frames"


def version ( ) :

    package_namespace = {}

    exec(
        open(join(package_name,"version.py")).read(),
        globals(),
        package_namespace
    )

    return package_namespace["__version__"]

def long_description():

    try:
        with io.open("README.md", encoding="utf-8") as readme:

            return readme.read()

    except IOError:

        logging.warning(
            "No README.md found, package long_description will be empty"
        )

        return None

setup(
    name = package_name,
    version = version(),
    description = "Modal security properties of while-programs checked over finite frames",
    long_description = long_description(),
    long_description_content_type = "text/markdown",
    packages = find_packages(exclude=["tests"]),
    python_requires = ">=3.8",
    install_requires=['numpy',
                      'pandas',
                      'more_itertools',
                      'lark',
                      ],
    extras_require = {'test' : ['pytest'],
                      'docs' : ['sphinx', 'sphinx_rtd_theme'],
                      },
    entry_points = {
        'console_scripts' : [
            'modal-security-frames = modal_security_frames.cli:main',
        ],
    },
)
