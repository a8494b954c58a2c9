"""Beacon transmit-power control simulator for vehicular networks."""

__version__ = "0.1.0"
