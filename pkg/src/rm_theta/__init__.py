"""Explicit local and global computations around theta lifts for RM abelian surfaces."""

__version__ = "0.1.0"
