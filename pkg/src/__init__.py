"""Nullspace embeddings of graphs and their spectral certificates."""

__version__ = "0.1.0"
