"""Disjoint paths with congestion on semicomplete digraphs."""

from ._ddplab import *  # noqa: F401,F403
from ._ddplab import DdpError

__all__ = [name for name in dir() if not name.startswith("_")]
