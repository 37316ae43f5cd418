"""Throughput versus energy-per-bit modelling of ultra-wideband WDM links."""

__version__ = "0.1.0"
