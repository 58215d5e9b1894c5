"""Parallel scaling analytics: scaling laws, effective-fraction estimation,
dispatch-timeline simulation, performance prediction and reporting."""

from ._core import *  # noqa: F401,F403

__version__ = "0.1.0"
