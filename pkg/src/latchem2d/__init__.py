"""Lattice simulation of 2D quantum chemistry with mediated interactions."""
__version__ = "0.1.0"
