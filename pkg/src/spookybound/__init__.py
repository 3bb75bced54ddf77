"""Desk-scale Bell-test pipeline bounding the speed of a hypothetical nonlocal influence."""

__version__ = "0.1.0"
