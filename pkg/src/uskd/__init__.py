"""Simulation toolkit for round-trip (doubly coupled) Mach-Zehnder key distribution."""

__version__ = "0.1.0"
