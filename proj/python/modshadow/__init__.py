"""Geodesic flow on the modular surface: shadowing, Bowen brackets, periodic
orbits and density experiments. Thin wrapper over the C++ core."""

from _modshadow import *  # noqa: F401,F403
from _modshadow import __doc__  # noqa: F401

try:
    from importlib.metadata import version as _version

    __version__ = _version("modshadow")
except Exception:  # pragma: no cover - not installed as a distribution
    __version__ = "0.1.0"
