"""Lindley processes, ladder epochs and recurrence classification."""

from ._lindrec import *  # noqa: F401,F403
from ._lindrec import __version__  # noqa: F401
