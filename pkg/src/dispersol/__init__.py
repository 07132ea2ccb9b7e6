"""Exact continuous dispersion on unit-edge graphs."""

__version__ = "0.1.0"
