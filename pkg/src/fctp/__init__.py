"""Exact tools for the fixed-charge transportation problem on graphs."""

__version__ = "0.1.0"
