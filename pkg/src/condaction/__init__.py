"""Quantum instruments, measurement dilations and entropy bounds for conditional action."""

__version__ = "0.1.0"
