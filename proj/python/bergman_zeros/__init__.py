"""Bergman kernels of the Poincare punctured disc and zeros of random holomorphic sections."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401

__version__ = "0.1.0"
