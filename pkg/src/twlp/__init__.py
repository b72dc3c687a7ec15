"""Twisted multiparameter Littlewood-Paley toolkit on periodic planar grids."""

__version__ = "0.1.0"
