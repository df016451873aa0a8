"""Exact p-adic Littlewood experiments over words, matrices and projective points."""

__version__ = "0.1.0"
