"""Modified Lomax degree-distribution fitting.

Thin Python wrapper over the C++ core; see the project README for the
library and CLI documentation.
"""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __version__  # noqa: F401
except ImportError:  # core built outside the package (development tree)
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
