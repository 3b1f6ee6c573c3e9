"""Exact sparse regression: least squares with an L0 selection charge, a
ridge term, and an optional coefficient box, solved to certified optimality
by branch and bound over a reduced perspective relaxation."""

from ._kernels import ElasticNetParams, PenaltyParams
from .bnb import BnBOutcome, solve, solve_path
from .config import SolverSettings
from .datasets import (SynthSpec, generate, lambda0_max, load_bin, load_csv,
                       normalize, save_bin, save_csv)
from .estimator import L0L2Regressor
from .problem import Dataset

__version__ = "0.1.0"

__all__ = [
    "BnBOutcome",
    "Dataset",
    "ElasticNetParams",
    "L0L2Regressor",
    "PenaltyParams",
    "SolverSettings",
    "SynthSpec",
    "generate",
    "lambda0_max",
    "load_bin",
    "load_csv",
    "normalize",
    "save_bin",
    "save_csv",
    "solve",
    "solve_path",
    "__version__",
]
