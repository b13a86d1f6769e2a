"""Subtitle-driven video summarization."""

__version__ = "0.1.0"
