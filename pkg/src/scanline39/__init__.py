"""Code 39 card scanning over a noisy symbol link, decoding and authentication."""

__version__ = "0.1.0"
