"""Numerical laboratory for abstract negotiation methods over convex domains."""

__version__ = "0.1.0"
