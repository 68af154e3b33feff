"""Friction-induced vibration monitoring of running-in wear."""

__version__ = "0.1.0"
