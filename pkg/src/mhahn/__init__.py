"""Exact and floating-point verification toolkit for the meta Hahn algebra,
its two-diagonal modules, their eigenbases and overlaps, and the Hahn
polynomials and rational Hahn functions those overlaps produce."""

__version__ = "0.1.0"

from .repn import GenericityError, ModuleParams, Representation, build_repn  # noqa: E402
from .scalar import EXACT, FLOAT, ZeroDenominator  # noqa: E402

__all__ = [
    "EXACT",
    "FLOAT",
    "GenericityError",
    "ModuleParams",
    "Representation",
    "ZeroDenominator",
    "build_repn",
    "__version__",
]
