"""Exact connection-game engines, gadget compilers, and verification harnesses."""

__version__ = "0.1.0"
