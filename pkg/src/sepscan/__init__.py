"""Covariance-query testers for tree structure and separation number."""

__version__ = "0.1.0"
