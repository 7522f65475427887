"""Bound-entanglement activation on two qutrit pairs via local rotate-measure dynamics."""

__version__ = "0.1.0"
