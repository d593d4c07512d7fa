"""Spectral toolkit for planar magnetic Dirac operators with MIT bag walls."""

__version__ = "0.1.0"
