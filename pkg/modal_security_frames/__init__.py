from __future__ import absolute_import
# expose the package version
from . import version


__version__ = version.__version__
