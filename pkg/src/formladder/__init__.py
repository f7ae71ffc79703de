"""Ladder operators on weighted differential-form spaces over coordinate
charts, with exact and numerical verification of their algebra and spectra."""

__version__ = "0.1.0"
