"""Gradient screening for the active-set violation checks.

A converged restricted solve must be checked for off-support coordinates
whose residual correlation exceeds the penalty threshold c.  The brute-force
check costs one full pass over the columns.  Screening replaces it with a
cached reference point beta0: since correlations are 1-Lipschitz in the
fitted values, every violator at the current point beta_hat lies inside

    V_hat = { i off support : |<r0, x_i>| > c - ||x @ beta0 - x @ beta_hat|| },

so only the columns in V_hat need exact correlations.  Keeping the reference
correlations sorted turns membership extraction into a binary search.  The
candidate superset is provably exact: filtering it by the true threshold
yields the same violation set as the brute-force pass, which keeps search
trees identical whether screening is on or off.

The cache is refreshed (beta0 <- beta_hat) whenever the candidate set grows
past eps_gs * p, and is handed from parent to child nodes unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import Dataset

DEFAULT_EPS_GS = 0.05


@dataclass(frozen=True)
class ScreenCache:
    """Immutable screening snapshot shared between nodes."""

    xbeta_ref: np.ndarray   # fitted values at the reference point
    order: np.ndarray       # column indices sorted by descending reference |corr|
    corr_desc: np.ndarray   # the sorted |corr| values themselves
    eps_gs: float = DEFAULT_EPS_GS


def build_cache(data: Dataset, residual: np.ndarray,
                eps_gs: float = DEFAULT_EPS_GS) -> ScreenCache:
    corr = np.abs(data.x.T @ residual)
    order = np.argsort(-corr, kind="stable")
    return ScreenCache(xbeta_ref=data.y - residual, order=order,
                       corr_desc=corr[order], eps_gs=eps_gs)


def candidate_set(cache: ScreenCache, data: Dataset, residual: np.ndarray,
                  threshold: float, ineligible: np.ndarray) -> np.ndarray:
    """Indices possibly violating the threshold at the current residual.

    ineligible is a boolean mask (fixed coordinates and the current support)
    excluded from the check.  Returns ascending indices.
    """
    drift = float(np.linalg.norm((data.y - residual) - cache.xbeta_ref))
    tau = threshold - drift
    if tau <= 0.0:
        k = cache.order.size
    else:
        # corr_desc is descending; count entries strictly above tau.
        k = int(np.searchsorted(-cache.corr_desc, -tau, side="left"))
    raw = cache.order[:k]
    cand = raw[~ineligible[raw]]
    cand.sort()
    return cand


def screened_violations(cache: ScreenCache, data: Dataset, residual: np.ndarray,
                        threshold: float, ineligible: np.ndarray
                        ) -> tuple[np.ndarray, int]:
    """Exact violation set extracted through the candidate superset.

    Returns (violations, candidate_count); the count drives cache refresh.
    """
    cand = candidate_set(cache, data, residual, threshold, ineligible)
    if cand.size == 0:
        return cand, 0
    corr = data.x[:, cand].T @ residual
    return cand[np.abs(corr) > threshold], int(cand.size)


def maybe_refresh(cache: ScreenCache, candidate_count: int, data: Dataset,
                  residual: np.ndarray) -> ScreenCache:
    """Rebuild the cache at the current point when the candidate set is too
    loose to be useful."""
    if candidate_count > cache.eps_gs * data.p:
        return build_cache(data, residual, cache.eps_gs)
    return cache
