"""Exact polynomial relations for quaternionic multiplication on abelian surfaces."""

__version__ = "0.1.0"
