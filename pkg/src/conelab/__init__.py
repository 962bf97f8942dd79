"""Numerical laboratory for Schrodinger operators on capped cones."""

__version__ = "0.1.0"

from . import errors, geometry  # noqa: F401
