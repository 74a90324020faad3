"""Boxed plane partitions and lozenge tilings of hexagons: counting, sampling, limit shapes."""

__version__ = "0.1.0"
