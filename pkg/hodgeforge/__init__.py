"""Exact Hodge and weight filtrations for Landau-Ginzburg models."""

__version__ = "0.1.0"
