"""Pandemic-in-a-growth-economy simulator, calibration toolkit, and
policy-experiment engine."""

from .params import ModelParams, default_params

__all__ = ["ModelParams", "default_params"]
__version__ = "0.1.0"
