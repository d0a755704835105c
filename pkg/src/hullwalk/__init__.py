"""Convex hulls of multidimensional random walks with stable increments."""

__version__ = "0.1.0"
