"""Circular rectification of multiview rigs and circular inter-view projection."""

from ._circrect import *  # noqa: F401,F403
from ._circrect import Error

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
