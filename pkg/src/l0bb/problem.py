"""Data container, node state and objective evaluation.

A Dataset always holds preprocessed inputs: columns of x and the response y
are scaled to unit L2 norm (and mean-centered when the centered flag is set).
Every solver routine relies on the unit column norms, so the constructor
validates them.  Sparse coefficient vectors are plain {index: value} dicts
with nonzero values; index keys refer to columns of x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from ._kernels import PenaltyParams

_UNIT_TOL = 1e-6


@dataclass
class Dataset:
    """Normalized design matrix and response with the scaling bookkeeping.

    column_norms and y_norm hold the L2 norms removed during normalization
    (after centering, when applied); they convert solutions back to the
    units of the raw inputs.  x is kept in column-major layout because the
    solver walks it column by column.
    """

    x: np.ndarray
    y: np.ndarray
    column_norms: np.ndarray
    y_norm: float
    centered: bool = True
    column_means: np.ndarray | None = None
    y_mean: float = 0.0

    def __post_init__(self) -> None:
        self.x = np.asfortranarray(self.x, dtype=np.float64)
        self.y = np.ascontiguousarray(self.y, dtype=np.float64)
        if self.x.ndim != 2 or self.y.ndim != 1 or self.x.shape[0] != self.y.shape[0]:
            raise ValueError("x must be n-by-p and y a length-n vector")
        col = np.sqrt(np.einsum("ij,ij->j", self.x, self.x))
        if col.size and (np.abs(col - 1.0) > _UNIT_TOL).any():
            worst = int(np.argmax(np.abs(col - 1.0)))
            raise ValueError(f"column {worst} is not unit-norm (norm {col[worst]:.6g}); "
                             "construct datasets through normalize()")
        ynorm = float(np.linalg.norm(self.y))
        if abs(ynorm - 1.0) > _UNIT_TOL:
            raise ValueError(f"y is not unit-norm (norm {ynorm:.6g}); "
                             "construct datasets through normalize()")
        self.column_norms = np.ascontiguousarray(self.column_norms, dtype=np.float64)
        if self.column_means is None:
            self.column_means = np.zeros(self.x.shape[1])
        self._xty: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @property
    def xty(self) -> np.ndarray:
        if self._xty is None:
            self._xty = self.x.T @ self.y
        return self._xty

    def to_original_units(self, beta: Mapping[int, float]) -> dict[int, float]:
        """Map scaled coefficients back to the units of the raw inputs."""
        return {int(i): float(v) * self.y_norm / float(self.column_norms[i])
                for i, v in beta.items()}

    def intercept_for(self, beta_original: Mapping[int, float]) -> float:
        """Intercept of the raw-unit model; zero for uncentered datasets."""
        if not self.centered:
            return 0.0
        shift = sum(v * float(self.column_means[i]) for i, v in beta_original.items())
        return float(self.y_mean - shift)


@dataclass
class NodeState:
    """One branch-and-bound node before its relaxation is solved.

    fixed_zero coordinates are removed from the problem, fixed_one ones carry
    the ridge penalty psi_tilde and stay in the active set permanently.  The
    warm start is a feasible sparse vector whose support avoids fixed_zero.
    """

    node_id: int
    depth: int
    fixed_zero: tuple[int, ...] = ()
    fixed_one: tuple[int, ...] = ()
    warm_start: dict[int, float] = field(default_factory=dict)
    active_set: tuple[int, ...] = ()
    parent_lower_bound: float = -math.inf
    screen: "object | None" = None

    def check(self, p: int) -> None:
        """Validate structural invariants; used by tests and debug asserts."""
        zero, one = set(self.fixed_zero), set(self.fixed_one)
        if zero & one:
            raise ValueError("fixed_zero and fixed_one overlap")
        if any(i < 0 or i >= p for i in zero | one):
            raise ValueError("fixed coordinate out of range")
        if zero & set(self.warm_start):
            raise ValueError("warm start places mass on a fixed-zero coordinate")
        if not one <= set(self.active_set):
            raise ValueError("every fixed-one coordinate must be in the active set")
        if zero & set(self.active_set):
            raise ValueError("active set contains a fixed-zero coordinate")


@dataclass
class RelaxResult:
    """Solution of one node relaxation."""

    beta: dict[int, float]
    objective: float
    dual_bound: float
    residual: np.ndarray
    support: tuple[int, ...]
    z: dict[int, float]
    s: dict[int, float]
    integral: bool
    active_set: tuple[int, ...]
    cycles: int
    converged: bool
    screen: "object | None" = None


def residual_for(data: Dataset, beta: Mapping[int, float]) -> np.ndarray:
    """y - x @ beta for a sparse beta."""
    r = data.y.copy()
    if beta:
        idx = np.fromiter(beta.keys(), dtype=np.intp, count=len(beta))
        vals = np.fromiter(beta.values(), dtype=np.float64, count=len(beta))
        r -= data.x[:, idx] @ vals
    return r


def objective_full(data: Dataset, beta: Mapping[int, float],
                   params: PenaltyParams) -> float:
    """Value of the exact objective at a sparse beta (zeros are dropped)."""
    r = residual_for(data, beta)
    nnz = sum(1 for v in beta.values() if v != 0.0)
    l2 = sum(v * v for v in beta.values())
    return 0.5 * float(r @ r) + params.lambda0 * nnz + params.lambda2 * l2


def objective_relaxation(data: Dataset, beta: Mapping[int, float], params,
                         fixed_one: Iterable[int] = ()) -> float:
    """Node relaxation objective at a sparse beta.

    Coordinates in fixed_one are charged psi_tilde, which contributes
    lambda0 even at zero; all others are charged psi.  Callers guarantee
    that beta is zero on fixed_zero coordinates.
    """
    r = residual_for(data, beta)
    one = set(fixed_one)
    total = 0.5 * float(r @ r)
    for i, v in beta.items():
        total += params.value_fixed(v) if i in one else params.value_free(v)
    total += sum(params.value_fixed(0.0) for i in one if i not in beta)
    return total


def recover_zs(beta: Mapping[int, float], params: PenaltyParams,
               fixed_one: Iterable[int] = ()) -> tuple[dict[int, float], dict[int, float]]:
    """Selection and conic auxiliaries (z, s) matching the relaxed penalty.

    The returned pair satisfies beta_i^2 <= s_i * z_i, |beta_i| <= big_m * z_i,
    z_i in [0, 1], and lambda0 * z_i + lambda2 * s_i equals the penalty value
    charged to coordinate i, so plugging (beta, z, s) into the conic program
    reproduces the relaxation objective.
    """
    one = set(fixed_one)
    z: dict[int, float] = {}
    s: dict[int, float] = {}
    for i in one:
        b = beta.get(i, 0.0)
        z[i] = 1.0
        s[i] = b * b
    for i, b in beta.items():
        if i in one:
            continue
        a = abs(b)
        if a == 0.0:
            z[i] = 0.0
            s[i] = 0.0
        elif params.regime == "huber":
            if a <= params.knee:
                z[i] = a / params.knee
                s[i] = a * params.knee
            else:
                z[i] = 1.0
                s[i] = b * b
        else:
            z[i] = a / params.big_m
            s[i] = a * params.big_m
    return z, s
