"""Atmospheric-turbulence stabilization toolkit."""

from ._turbstab import *  # noqa: F401,F403
from ._turbstab import __version__  # noqa: F401
