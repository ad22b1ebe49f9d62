"""Theta functions, Kummer secants, formal KP/Toda operator algebra and
Calogero-Moser spectral curves."""

__version__ = "0.1.0"
