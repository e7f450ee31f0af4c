"""Banded spatio-temporal autoregressions."""

from ._core import __version__, fit, forecast, select_bandwidth, simulate

__all__ = ["__version__", "fit", "forecast", "select_bandwidth", "simulate"]
