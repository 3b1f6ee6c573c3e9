"""Scalar kernels for the separable penalties of the box relaxation.

The estimator minimizes

    0.5 * ||y - X b||^2 + lambda0 * ||b||_0 + lambda2 * ||b||^2,
    |b_i| <= big_m,

and its branch-and-bound nodes solve convex relaxations whose separable
penalty psi depends on the ratio kappa = sqrt(lambda0 / lambda2):

* reverse-Huber regime, kappa <= big_m:
      psi(b) = 2 * sqrt(lambda0 * lambda2) * |b|        if |b| <= kappa,
               lambda0 + lambda2 * b**2                 otherwise,
  which is 2 * lambda0 * B(b * sqrt(lambda2 / lambda0)) for the reverse
  Huber function B;
* pure-L1 regime, kappa > big_m (always the case when lambda2 == 0):
      psi(b) = (lambda0 / big_m + lambda2 * big_m) * |b|.

Coordinates fixed to be nonzero during the search use the ridge penalty
psi_tilde(b) = lambda0 + lambda2 * b**2 instead.

All proximal maps reduce to soft-thresholding, scaling and clipping, so a
single boxed soft-threshold primitive covers every case.  Functions here are
scalar on purpose: they sit in the innermost coordinate-descent loop and are
called with plain floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

REGIME_HUBER = "huber"
REGIME_L1 = "l1"


def reverse_huber(t: float) -> float:
    """Reverse Huber function: linear near zero, quadratic in the tails."""
    a = abs(t)
    if a <= 1.0:
        return a
    return 0.5 * (a * a + 1.0)


def box_soft_threshold(t: float, a: float, m: float) -> float:
    """Soft-threshold t by a >= 0, then clip the magnitude at m.

    Returns 0 when |t| <= a, (|t| - a) * sign(t) when a < |t| <= a + m, and
    m * sign(t) beyond that.  Both a == 0 (pure clipping) and m == inf (pure
    soft-thresholding) are valid.
    """
    mag = abs(t) - a
    if mag <= 0.0:
        return 0.0
    if mag > m:
        mag = m
    return mag if t > 0.0 else -mag


@dataclass
class PenaltyParams:
    """Penalty configuration with the derived regime tag and constants.

    big_m may be math.inf, meaning no box; that requires lambda2 > 0 since
    otherwise the relaxation is unbounded in the penalty sense.
    """

    lambda0: float
    lambda2: float
    big_m: float = math.inf

    def __post_init__(self) -> None:
        lam0, lam2, m = float(self.lambda0), float(self.lambda2), float(self.big_m)
        if not math.isfinite(lam0) or lam0 <= 0.0:
            raise ValueError(f"lambda0 must be a positive finite number, got {self.lambda0!r}")
        if not math.isfinite(lam2) or lam2 < 0.0:
            raise ValueError(f"lambda2 must be a nonnegative finite number, got {self.lambda2!r}")
        if math.isnan(m) or m <= 0.0:
            raise ValueError(f"big_m must be positive (math.inf allowed), got {self.big_m!r}")
        if lam2 == 0.0 and math.isinf(m):
            raise ValueError("lambda2 == 0 with big_m == inf leaves every nonzero "
                             "coefficient unpenalized in magnitude; set a finite big_m "
                             "or a positive lambda2")
        self.lambda0 = lam0
        self.lambda2 = lam2
        self.big_m = m
        if lam2 > 0.0:
            self.knee = math.sqrt(lam0 / lam2)
            self.two_sqrt = 2.0 * math.sqrt(lam0 * lam2)
        else:
            self.knee = math.inf
            self.two_sqrt = 0.0
        # Ties go to the reverse-Huber regime.
        self.regime = REGIME_HUBER if self.knee <= m else REGIME_L1
        self.l1_weight = lam0 / m + lam2 * m if self.regime == REGIME_L1 else math.inf
        self.ridge_scale = 1.0 / (1.0 + 2.0 * lam2)

    @property
    def zero_threshold(self) -> float:
        """Correlation magnitude below which a free coordinate stays at zero."""
        if self.regime == REGIME_HUBER:
            return self.two_sqrt
        return self.l1_weight

    def value_free(self, b: float) -> float:
        """psi(b) for a coordinate that is not fixed by the search."""
        if b == 0.0:
            return 0.0
        if self.regime == REGIME_HUBER:
            a = abs(b)
            if a <= self.knee:
                return self.two_sqrt * a
            return self.lambda0 + self.lambda2 * b * b
        return self.l1_weight * abs(b)

    def value_fixed(self, b: float) -> float:
        """psi_tilde(b) = lambda0 + lambda2 * b**2 for a coordinate fixed nonzero."""
        return self.lambda0 + self.lambda2 * b * b

    def prox_free(self, bt: float) -> float:
        """argmin_b 0.5 * (b - bt)^2 + psi(b) subject to |b| <= big_m."""
        if self.regime == REGIME_HUBER:
            if abs(bt) <= self.two_sqrt + self.knee:
                return box_soft_threshold(bt, self.two_sqrt, self.big_m)
            return box_soft_threshold(bt * self.ridge_scale, 0.0, self.big_m)
        return box_soft_threshold(bt, self.l1_weight, self.big_m)

    def prox_fixed(self, bt: float) -> float:
        """argmin_b 0.5 * (b - bt)^2 + psi_tilde(b) subject to |b| <= big_m."""
        return box_soft_threshold(bt * self.ridge_scale, 0.0, self.big_m)


@dataclass
class ElasticNetParams:
    """L1 plus ridge penalty with a box, l1 * |b| + l2 * b**2 on |b| <= big_m.

    Reference relaxation reusing the same coordinate-descent engine; it has no
    notion of fixed-nonzero coordinates.
    """

    l1: float
    l2: float
    big_m: float

    def __post_init__(self) -> None:
        if self.l1 < 0.0 or self.l2 < 0.0 or self.big_m <= 0.0:
            raise ValueError("l1 and l2 must be nonnegative and big_m positive")
        self.ridge_scale = 1.0 / (1.0 + 2.0 * self.l2)

    @property
    def zero_threshold(self) -> float:
        return self.l1

    def value_free(self, b: float) -> float:
        return self.l1 * abs(b) + self.l2 * b * b

    def prox_free(self, bt: float) -> float:
        return box_soft_threshold(bt * self.ridge_scale, self.l1 * self.ridge_scale,
                                  self.big_m)

    def value_fixed(self, b: float) -> float:
        raise TypeError("elastic-net penalty has no fixed-nonzero coordinates")

    def prox_fixed(self, bt: float) -> float:
        raise TypeError("elastic-net penalty has no fixed-nonzero coordinates")


def penalty_psi(b: float, params: PenaltyParams) -> float:
    return params.value_free(b)


def penalty_psi_tilde(b: float, params: PenaltyParams) -> float:
    return params.value_fixed(b)


def prox_psi(bt: float, params: PenaltyParams) -> float:
    return params.prox_free(bt)


def prox_psi_tilde(bt: float, params: PenaltyParams) -> float:
    return params.prox_fixed(bt)
