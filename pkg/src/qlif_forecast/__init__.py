"""Quantum and classical leaky integrate-and-fire networks for time-series forecasting."""

__version__ = "0.1.0"
