"""Finite-dimensional split constructions, subalgebra entropies and their bounds."""

__version__ = "0.1.0"
