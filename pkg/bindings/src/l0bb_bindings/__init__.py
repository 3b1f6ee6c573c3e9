"""In-memory bindings for the l0bb exact sparse regression solver."""

from ._core import FitHandle, fit, fit_path, generate_synthetic

__all__ = ["FitHandle", "fit", "fit_path", "generate_synthetic"]
__version__ = "0.1.0"
