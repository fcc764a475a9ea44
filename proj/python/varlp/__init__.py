"""Variable-exponent total variation: kernels, operators and solvers.

Everything lives in the compiled extension; this package re-exports it.
"""

from ._varlp import *  # noqa: F401,F403
from ._varlp import __version__  # noqa: F401
