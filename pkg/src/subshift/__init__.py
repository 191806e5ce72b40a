"""Executable symbolic dynamics for subshifts of finite type over Z^d x G."""

__version__ = "0.1.0"
