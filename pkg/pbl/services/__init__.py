"""
Services package
"""
from pbl.services.wiener import TimeGrid, WienerPath, sample_path, shift, zero_path
from pbl.services.path_cache import PathCache, path_cache
from pbl.services.coefficients import make_beta, make_gamma
from pbl.services.quadrature import QuadratureSpec

__all__ = [
    "TimeGrid",
    "WienerPath",
    "sample_path",
    "shift",
    "zero_path",
    "PathCache",
    "path_cache",
    "make_beta",
    "make_gamma",
    "QuadratureSpec",
]
