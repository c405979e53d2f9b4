"""Holonic system-of-systems runtime and multimodal urban mobility simulator."""

__version__ = "0.1.0"
