"""Speech-pattern feature extraction and tree-ensemble screening models."""

__version__ = "0.1.0"
