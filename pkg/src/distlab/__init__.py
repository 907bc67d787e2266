"""Exact distinguishing numbers and fixing-type checks for finite relational structures."""

__version__ = "0.1.0"
