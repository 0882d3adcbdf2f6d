"""Exact preperiodicity portraits for rational maps over Q(t)."""

__version__ = "0.1.0"
