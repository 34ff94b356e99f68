"""Exact simulation of three-party controlled teleportation and the controlled
secure direct communication scheme built on it."""

__version__ = "0.1.0"
