"""Weil-Petersson random punctured spheres: volumes, Poisson constants and
finite-n bounds for short geodesics, systoles and small eigenvalues."""

from .bessel import LengthWindow, alpha_closed, bessel_constants, lambda_window, systole_limit_constant
from .intervals import Interval
from .moments import MomentRequest, factorial_moment
from .volumes import VolumeTable, build_volume_table, get_table

__version__ = "0.1.0"

__all__ = [
    "Interval",
    "LengthWindow",
    "MomentRequest",
    "VolumeTable",
    "alpha_closed",
    "bessel_constants",
    "build_volume_table",
    "factorial_moment",
    "get_table",
    "lambda_window",
    "systole_limit_constant",
]
