"""Anisotropic Minkowski gauges, their Legendre transforms, the associated
degenerate quasilinear operators, and explicit fundamental solutions."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
