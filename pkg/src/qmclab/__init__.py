"""Numerical toolkit for Quantum Max-Cut, product states, and projection rounding."""

__version__ = "0.1.0"
