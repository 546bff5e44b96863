"""Projection onto three-view cardinality structures, IHT/GradMP solvers and experiment drivers."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
