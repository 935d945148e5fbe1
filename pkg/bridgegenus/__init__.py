"""Bridgegenus - genus statistics and certified 4-genus bounds for 2-bridge knots."""

__version__ = "0.1.0"
