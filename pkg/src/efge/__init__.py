"""Exponential-family graph embeddings learned from random-walk contexts."""

__version__ = "0.1.0"
