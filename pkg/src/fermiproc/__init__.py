"""Emulator for a fermionic tweezer-array quantum processor."""

__version__ = "0.1.0"
