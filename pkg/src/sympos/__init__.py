"""Positive paths in Sp(2) and Sp(4)."""
__version__ = "0.1.0"
