"""Weighted semigroup algebras: iterated weights, operator norms and the F-property."""

__version__ = "0.1.0"
