"""Least-expected-cost join-order optimization under uncertain run-time parameters."""

__version__ = "0.1.0"
