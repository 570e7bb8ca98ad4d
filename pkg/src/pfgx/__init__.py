"""Desk-scale blockchain node and explorer for formalized mathematics."""

__version__ = "0.1.0"
