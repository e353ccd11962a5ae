"""Orbit counting, critical exponents and Patterson-Sullivan measures for Kleinian groups."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("hypcount")
except PackageNotFoundError:
    __version__ = "0.0.0+local"
