"""Exact engine for parametric linear recurrences specialized at roots of unity."""

__version__ = "0.1.0"
