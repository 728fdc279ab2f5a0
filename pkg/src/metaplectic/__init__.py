"""Exact finite-level computations for n-fold metaplectic covers of SL2 and GL2 over Q_p."""

__version__ = "0.1.0"
