"""Wireless multicast capacity scaling experiments."""

from ._wlcap import *  # noqa: F401,F403
from ._wlcap import Mode, simulate, run_experiment  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
