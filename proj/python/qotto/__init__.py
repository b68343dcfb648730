"""Work-heat statistics and efficiency large deviations of quantum Otto engines."""

from ._qotto import *  # noqa: F401,F403
from ._qotto import __version__  # noqa: F401
