"""Exact simulation and Lieb-Robinson bound verification for commuting lattice models."""

__version__ = "0.1.0"
