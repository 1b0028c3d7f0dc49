"""Multilingual extractive question answering platform and eval toolchain."""

__version__ = "0.1.0"
