"""Stochastic primal-dual proximal extra-gradient solver.

Thin wrapper over the C++ extension; see ``help(spdpeg._spdpeg)``.
"""

from ._spdpeg import *  # noqa: F401,F403
from ._spdpeg import InputError, NumericError, __doc__  # noqa: F401

__version__ = "0.1.0"
