"""Cyclic coordinate descent with active sets for the node relaxations.

Each node relaxation is separable enough that exact coordinate minimization
is a closed-form threshold step, so the solver is a plain cyclic loop over a
small active set with an incrementally maintained residual.  After the
restricted problem converges, off-support coordinates whose residual
correlation exceeds the penalty threshold are pulled into the active set and
the solve repeats; the relaxation is solved exactly when no violations
remain.  The violation sweep optionally goes through the gradient screening
cache instead of a full pass over the columns.

A converged node is certified by the analytic dual bound; when the relative
primal-dual gap is wider than requested, the coordinate-descent tolerance is
tightened and the solve resumes from the current point.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import screening
from ._kernels import PenaltyParams
from .config import SolverSettings
from .duality import build_dual
from .problem import Dataset, NodeState, RelaxResult, recover_zs

log = logging.getLogger("l0bb")

RESIDUAL_REFRESH_EVERY = 100
_PD_TIGHTEN_ROUNDS = 8
_CD_TOL_FLOOR = 1e-15


@dataclass
class CdWorkspace:
    """Mutable state of one node solve."""

    beta: np.ndarray
    residual: np.ndarray
    active: np.ndarray
    objective: float = math.inf
    cycles: int = 0


def node_masks(node: NodeState, p: int) -> tuple[np.ndarray, np.ndarray]:
    zero = np.zeros(p, dtype=bool)
    one = np.zeros(p, dtype=bool)
    if node.fixed_zero:
        zero[list(node.fixed_zero)] = True
    if node.fixed_one:
        one[list(node.fixed_one)] = True
    return zero, one


def make_workspace(data: Dataset, params, node: NodeState,
                   active: np.ndarray, one_mask: np.ndarray) -> CdWorkspace:
    beta = np.zeros(data.p)
    big_m = params.big_m
    for i, v in node.warm_start.items():
        beta[i] = min(max(float(v), -big_m), big_m)
    ws = CdWorkspace(beta=beta, residual=np.empty(0), active=np.asarray(active, dtype=np.intp))
    refresh_residual(data, ws)
    ws.objective = evaluate_objective(data, params, ws, one_mask)
    return ws


def refresh_residual(data: Dataset, ws: CdWorkspace) -> None:
    nz = np.flatnonzero(ws.beta)
    if nz.size:
        ws.residual = data.y - data.x[:, nz] @ ws.beta[nz]
    else:
        ws.residual = data.y.copy()


def evaluate_objective(data: Dataset, params, ws: CdWorkspace,
                       one_mask: np.ndarray) -> float:
    r = ws.residual
    total = 0.5 * float(r @ r)
    beta = ws.beta
    for i in ws.active:
        b = beta[i]
        if one_mask[i]:
            total += params.value_fixed(b)
        elif b != 0.0:
            total += params.value_free(b)
    return total


def cd_cycle(data: Dataset, params, ws: CdWorkspace,
             one_mask: np.ndarray) -> tuple[float, float]:
    """One pass of cyclic coordinate descent over the active set.

    Relies on unit-norm columns: the coordinate-wise problem at i has the
    closed form prox applied to <r, x_i> + beta_i.  Returns the refreshed
    objective and the largest coefficient move of the pass.
    """
    x = data.x
    r = ws.residual
    beta = ws.beta
    max_step = 0.0
    for i in ws.active:
        col = x[:, i]
        b_old = beta[i]
        bt = float(r @ col) + b_old
        b_new = params.prox_fixed(bt) if one_mask[i] else params.prox_free(bt)
        if b_new != b_old:
            r -= (b_new - b_old) * col
            beta[i] = b_new
            step = abs(b_new - b_old)
            if step > max_step:
                max_step = step
    ws.cycles += 1
    ws.objective = evaluate_objective(data, params, ws, one_mask)
    return ws.objective, max_step


def solve_restricted(data: Dataset, params, ws: CdWorkspace, one_mask: np.ndarray,
                     tol: float, max_cycles: int) -> bool:
    """Run coordinate descent on the current active set until the relative
    objective change drops below tol.  Returns False when the cycle cap is
    reached first; the caller may widen the tolerance or accept the point,
    whose objective and residual remain valid either way."""
    prev = ws.objective
    for _ in range(max_cycles):
        obj, step = cd_cycle(data, params, ws, one_mask)
        if ws.cycles % RESIDUAL_REFRESH_EVERY == 0:
            refresh_residual(data, ws)
            obj = evaluate_objective(data, params, ws, one_mask)
            ws.objective = obj
        if step == 0.0:
            return True
        if abs(prev - obj) <= tol * max(abs(obj), 1e-10):
            return True
        prev = obj
    return False


def check_violations(data: Dataset, params, ws: CdWorkspace,
                     zero_mask: np.ndarray, one_mask: np.ndarray) -> np.ndarray:
    """Brute-force violation sweep over all free off-support coordinates."""
    corr = data.x.T @ ws.residual
    eligible = ~zero_mask & ~one_mask & (ws.beta == 0.0)
    return np.flatnonzero(eligible & (np.abs(corr) > params.zero_threshold))


def solve_node(data: Dataset, params, node: NodeState,
               settings: SolverSettings | None = None) -> RelaxResult:
    """Solve one node relaxation to a certified primal-dual gap.

    On return the violation set is empty, the dual bound never exceeds the
    primal value, and for perspective penalties the recovered selection
    variables are attached along with the integrality flag.
    """
    settings = settings or SolverSettings()
    p = data.p
    zero_mask, one_mask = node_masks(node, p)
    perspective = isinstance(params, PenaltyParams)
    active = sorted((set(node.active_set) | set(node.fixed_one) | set(node.warm_start))
                    - set(node.fixed_zero))
    ws = make_workspace(data, params, node, np.asarray(active, dtype=np.intp), one_mask)
    screen = node.screen
    use_screen = settings.screening_enabled(p)
    threshold = params.zero_threshold
    base_ineligible = zero_mask | one_mask
    tol = settings.cd_tolerance
    rounds = 0
    converged = True
    dual_value = -math.inf
    warned = False
    while True:
        while True:
            converged = solve_restricted(data, params, ws, one_mask, tol,
                                         settings.max_cd_cycles)
            if not converged and not warned:
                warned = True
                log.warning("node %d: coordinate descent hit the %d-cycle cap "
                            "(tol %.1e); continuing with the current point",
                            node.node_id, settings.max_cd_cycles, tol)
            if use_screen and screen is None:
                screen = screening.build_cache(data, ws.residual, settings.eps_gs)
            if use_screen:
                ineligible = base_ineligible | (ws.beta != 0.0)
                viol, cand_n = screening.screened_violations(
                    screen, data, ws.residual, threshold, ineligible)
                if settings.screening_audit:
                    brute = check_violations(data, params, ws, zero_mask, one_mask)
                    cand = screening.candidate_set(screen, data, ws.residual,
                                                  threshold, ineligible)
                    if not set(brute) <= set(cand):
                        raise AssertionError("screening candidate set missed a violation")
                    if not np.array_equal(viol, brute):
                        raise AssertionError("screened violations differ from brute force")
                screen = screening.maybe_refresh(screen, cand_n, data, ws.residual)
            else:
                viol = check_violations(data, params, ws, zero_mask, one_mask)
            if viol.size == 0:
                break
            ws.active = np.union1d(ws.active, viol)
        refresh_residual(data, ws)
        ws.objective = evaluate_objective(data, params, ws, one_mask)
        primal = ws.objective
        if not perspective:
            break
        support = np.asarray([i for i in ws.active
                              if ws.beta[i] != 0.0 and not one_mask[i]], dtype=np.intp)
        dp = build_dual(data, params, ws.residual, support,
                        np.asarray(node.fixed_one, dtype=np.intp))
        dual_value = min(dp.value, primal)
        if primal - dual_value <= settings.pd_gap * max(primal, 1e-300):
            break
        if tol <= _CD_TOL_FLOOR or rounds >= _PD_TIGHTEN_ROUNDS:
            log.warning("node %d: accepting primal-dual gap %.3e above target %.3e",
                        node.node_id, (primal - dual_value) / max(primal, 1e-300),
                        settings.pd_gap)
            break
        tol = max(tol * 1e-2, _CD_TOL_FLOOR)
        rounds += 1
    beta_map = {int(i): float(ws.beta[i]) for i in ws.active if ws.beta[i] != 0.0}
    if perspective:
        z, s = recover_zs(beta_map, params, node.fixed_one)
        one = set(node.fixed_one)
        integral = all(zi <= settings.int_tol or zi >= 1.0 - settings.int_tol
                       for i, zi in z.items() if i not in one)
    else:
        z, s, integral = {}, {}, False
    return RelaxResult(beta=beta_map, objective=ws.objective, dual_bound=dual_value,
                       residual=ws.residual, support=tuple(sorted(beta_map)),
                       z=z, s=s, integral=integral,
                       active_set=tuple(int(i) for i in ws.active),
                       cycles=ws.cycles, converged=converged, screen=screen)
