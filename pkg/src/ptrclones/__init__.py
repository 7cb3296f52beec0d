"""Pointer-related clone detection for C with verification-driven feedback."""

__version__ = "0.1.0"
