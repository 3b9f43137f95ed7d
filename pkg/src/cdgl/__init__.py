"""Exact computations with complete differential graded Lie algebras over Q."""

__version__ = "0.1.0"
