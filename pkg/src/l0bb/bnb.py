"""Best-first branch and bound over the selection variables.

Nodes are explored in (parent bound, depth, insertion index) order, with ties
broken toward deeper nodes then lower index.  Every solved node contributes a
polished incumbent (a ridge re-fit on the relaxation support), a certified
dual bound, and either closes (integral relaxation or bound above the pruning
threshold) or branches on one fractional selection variable chosen by fast
strong branching restricted to the node's active set.

The global lower bound is the smallest bound among open nodes, falling back
to the smallest closed-subtree bound once the queue empties; it never
decreases.  The search stops when the relative gap between the incumbent and
the lower bound reaches the target, or a node or time limit fires.
"""

from __future__ import annotations

import heapq
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._kernels import PenaltyParams
from .config import SolverSettings
from .problem import Dataset, NodeState, RelaxResult, objective_full
from .relaxation import (CdWorkspace, evaluate_objective, node_masks,
                         refresh_residual, solve_node, solve_restricted)

log = logging.getLogger("l0bb")

_STRONG_POOL = 10
_STRONG_TOL_FACTOR = 100.0
_STRONG_MAX_CYCLES = 25
_LADDER = (1, 2, 3, 5, 8, 13, 21, 34, 55)


@dataclass
class BnBOutcome:
    """Result of one branch-and-bound run.  beta is in normalized units."""

    beta: dict[int, float]
    objective: float
    lower_bound: float
    rel_gap: float
    nodes_explored: int
    status: str
    wall_time: float


def polish_support(data: Dataset, params: PenaltyParams,
                   support: Iterable[int]) -> tuple[dict[int, float], float]:
    """Ridge re-fit of the coefficients on a fixed support, respecting the
    box; returns the sparse vector and its exact objective."""
    idx = sorted(set(int(i) for i in support))
    if not idx:
        return {}, 0.5 * float(data.y @ data.y)
    xs = data.x[:, idx]
    k = len(idx)
    gram0 = xs.T @ xs
    rhs = xs.T @ data.y
    gram = gram0 + 2.0 * params.lambda2 * np.eye(k)
    try:
        sol = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    big_m = params.big_m
    if np.max(np.abs(sol)) > big_m:
        sol = _box_ridge_cd(gram0, rhs, params.lambda2, big_m,
                            np.clip(sol, -big_m, big_m))
    beta = {i: float(v) for i, v in zip(idx, sol) if v != 0.0}
    return beta, objective_full(data, beta, params)


def _box_ridge_cd(gram0: np.ndarray, rhs: np.ndarray, lambda2: float,
                  big_m: float, start: np.ndarray) -> np.ndarray:
    """Projected cyclic coordinate descent for the box-constrained ridge
    subproblem; gram0 has unit diagonal because columns are unit-norm."""
    b = start.copy()
    denom = 1.0 + 2.0 * lambda2
    k = b.size
    for _ in range(2000):
        biggest = 0.0
        for j in range(k):
            bt = rhs[j] - float(gram0[j] @ b) + b[j]
            new = min(max(bt / denom, -big_m), big_m)
            move = abs(new - b[j])
            if move > biggest:
                biggest = move
            b[j] = new
        if biggest <= 1e-13 * max(1.0, float(np.max(np.abs(b)))):
            break
    return b


def _heuristic_cd(data: Dataset, params: PenaltyParams,
                  start: Mapping[int, float], max_cycles: int = 50) -> dict[int, float]:
    """Cyclic coordinate minimization of the exact objective over all
    coordinates; each step solves the scalar subproblem with the L0 charge
    in closed form."""
    x, y = data.x, data.y
    p = data.p
    beta = np.zeros(p)
    for i, v in start.items():
        beta[i] = min(max(float(v), -params.big_m), params.big_m)
    nz = np.flatnonzero(beta)
    r = y - x[:, nz] @ beta[nz] if nz.size else y.copy()
    lam0, lam2, big_m = params.lambda0, params.lambda2, params.big_m
    scale = params.ridge_scale
    for _ in range(max_cycles):
        changed = False
        for i in range(p):
            col = x[:, i]
            b_old = beta[i]
            bt = float(r @ col) + b_old
            cand = bt * scale
            if cand > big_m:
                cand = big_m
            elif cand < -big_m:
                cand = -big_m
            f_keep = 0.5 * (cand - bt) ** 2 + lam0 + lam2 * cand * cand
            b_new = cand if f_keep < 0.5 * bt * bt else 0.0
            if b_new != b_old:
                r -= (b_new - b_old) * col
                beta[i] = b_new
                changed = True
        if not changed:
            break
    return {int(i): float(beta[i]) for i in np.flatnonzero(beta)}


def initial_incumbent(data: Dataset, params: PenaltyParams
                      ) -> tuple[dict[int, float], float]:
    """Feasible starting solution: coordinate-wise minimization from zero,
    a ladder of top-correlation supports, and a ridge polish of each."""
    best_beta: dict[int, float] = {}
    best_obj = 0.5 * float(data.y @ data.y)

    def offer(beta: Mapping[int, float]) -> None:
        nonlocal best_beta, best_obj
        pb, po = polish_support(data, params, beta.keys())
        if po < best_obj:
            best_beta, best_obj = pb, po

    offer(_heuristic_cd(data, params, {}))
    order = np.argsort(-np.abs(data.xty), kind="stable")
    cap = min(data.n, data.p, _LADDER[-1])
    for k in _LADDER:
        if k > cap:
            break
        offer({int(i): 0.0 for i in order[:k]})
    if best_beta:
        offer(_heuristic_cd(data, params, best_beta))
    return best_beta, best_obj


def _probe_child(data: Dataset, params: PenaltyParams, res: RelaxResult,
                 one_mask: np.ndarray, j: int, to_one: bool,
                 tol: float) -> float:
    """Loosely solve one prospective child restricted to the parent's active
    set; used only for branching scores."""
    beta = np.zeros(data.p)
    for i, v in res.beta.items():
        beta[i] = v
    r = res.residual.copy()
    active = np.asarray(res.active_set, dtype=np.intp)
    mask = one_mask
    if to_one:
        mask = one_mask.copy()
        mask[j] = True
    else:
        if beta[j] != 0.0:
            r += beta[j] * data.x[:, j]
            beta[j] = 0.0
        active = active[active != j]
    ws = CdWorkspace(beta=beta, residual=r, active=active)
    ws.objective = evaluate_objective(data, params, ws, mask)
    solve_restricted(data, params, ws, mask, tol, _STRONG_MAX_CYCLES)
    return ws.objective


def select_branch(data: Dataset, params: PenaltyParams, node: NodeState,
                  res: RelaxResult, settings: SolverSettings) -> int:
    """Pick the branching coordinate among fractional selection variables."""
    one = set(node.fixed_one)
    frac = [(i, min(z, 1.0 - z)) for i, z in res.z.items()
            if i not in one and settings.int_tol < z < 1.0 - settings.int_tol]
    frac.sort(key=lambda t: (-t[1], t[0]))
    if not frac:
        raise RuntimeError("select_branch called on an integral relaxation")
    if settings.branching == "frac" or len(frac) == 1:
        return frac[0][0]
    pool = frac[:_STRONG_POOL]
    _, one_mask = node_masks(node, data.p)
    tol = settings.cd_tolerance * _STRONG_TOL_FACTOR
    best_i, best_key = pool[0][0], None
    for i, f in pool:
        down = _probe_child(data, params, res, one_mask, i, False, tol)
        up = _probe_child(data, params, res, one_mask, i, True, tol)
        score = min(down, up) - res.objective
        key = (score, f, -i)
        if best_key is None or key > best_key:
            best_i, best_key = i, key
    return best_i


def _make_children(node: NodeState, res: RelaxResult, j: int,
                   id0: int, id1: int) -> tuple[NodeState, NodeState]:
    warm0 = {i: v for i, v in res.beta.items() if i != j}
    child0 = NodeState(node_id=id0, depth=node.depth + 1,
                       fixed_zero=tuple(sorted(node.fixed_zero + (j,))),
                       fixed_one=node.fixed_one, warm_start=warm0,
                       active_set=tuple(i for i in res.active_set if i != j),
                       parent_lower_bound=res.dual_bound, screen=res.screen)
    active1 = res.active_set if j in res.active_set else tuple(sorted(res.active_set + (j,)))
    child1 = NodeState(node_id=id1, depth=node.depth + 1,
                       fixed_zero=node.fixed_zero,
                       fixed_one=tuple(sorted(node.fixed_one + (j,))),
                       warm_start=dict(res.beta), active_set=active1,
                       parent_lower_bound=res.dual_bound, screen=res.screen)
    return child0, child1


def solve(data: Dataset, params: PenaltyParams,
          settings: SolverSettings | None = None,
          warm_start: Mapping[int, float] | None = None) -> BnBOutcome:
    """Solve the exact problem to the requested relative gap.

    warm_start, when given, seeds both the incumbent and the root relaxation;
    it is clipped to the box and never hurts the final objective.
    """
    if not isinstance(params, PenaltyParams):
        raise TypeError("solve requires PenaltyParams")
    settings = settings or SolverSettings()
    t0 = time.perf_counter()
    p = data.p

    inc_beta, ub = initial_incumbent(data, params)
    root_warm: dict[int, float]
    if warm_start:
        big_m = params.big_m
        clipped = {int(i): min(max(float(v), -big_m), big_m)
                   for i, v in warm_start.items() if v != 0.0}
        pb, po = polish_support(data, params, clipped.keys())
        if po < ub:
            inc_beta, ub = pb, po
        root_warm = clipped
    else:
        root_warm = dict(inc_beta)

    kappa = min(2 * len(inc_beta) + 10, p)
    root_active = np.sort(np.argsort(-np.abs(data.xty), kind="stable")[:kappa])
    root = NodeState(node_id=0, depth=0, warm_start=root_warm,
                     active_set=tuple(int(i) for i in root_active))

    prune_slack = min(settings.pd_gap, settings.rel_gap_target)
    heap: list[tuple[float, int, int, NodeState]] = []
    heapq.heappush(heap, (root.parent_lower_bound, 0, 0, root))
    next_id = 1
    nodes_explored = 0
    closed_min = math.inf
    status = "converged"
    executor = ThreadPoolExecutor(max_workers=settings.workers) if settings.workers > 1 else None

    def current_lb() -> float:
        if heap:
            return heap[0][0]
        return min(closed_min, ub)

    try:
        while heap:
            lb = current_lb()
            if ub - lb <= settings.rel_gap_target * ub:
                break
            if settings.node_limit is not None and nodes_explored >= settings.node_limit:
                status = "node_limit"
                break
            if settings.time_limit is not None and time.perf_counter() - t0 > settings.time_limit:
                status = "time_limit"
                break
            batch: list[NodeState] = []
            width = settings.workers if executor is not None else 1
            while heap and len(batch) < width:
                bound, _, _, node = heapq.heappop(heap)
                if bound >= ub * (1.0 - prune_slack):
                    closed_min = min(closed_min, bound)
                    continue
                batch.append(node)
            if not batch:
                continue
            if executor is not None and len(batch) > 1:
                results = list(executor.map(
                    lambda nd: solve_node(data, params, nd, settings), batch))
            else:
                results = [solve_node(data, params, nd, settings) for nd in batch]
            for node, res in zip(batch, results):
                nodes_explored += 1
                if res.support:
                    pb, po = polish_support(data, params, res.support)
                    if po < ub:
                        inc_beta, ub = pb, po
                if res.integral:
                    one = set(node.fixed_one)
                    rounded = [i for i in res.beta
                               if i in one or res.z.get(i, 0.0) >= 0.5]
                    if len(rounded) != len(res.beta):
                        pb, po = polish_support(data, params, rounded)
                        if po < ub:
                            inc_beta, ub = pb, po
                pruned = res.dual_bound >= ub * (1.0 - prune_slack)
                branch_var: int | None = None
                if pruned or res.integral:
                    closed_min = min(closed_min, res.dual_bound)
                else:
                    branch_var = select_branch(data, params, node, res, settings)
                    child0, child1 = _make_children(node, res, branch_var,
                                                    next_id, next_id + 1)
                    next_id += 2
                    heapq.heappush(heap, (res.dual_bound, -child0.depth,
                                          child0.node_id, child0))
                    heapq.heappush(heap, (res.dual_bound, -child1.depth,
                                          child1.node_id, child1))
                if settings.trace is not None:
                    lb_rec = min(current_lb(), ub)
                    settings.trace({
                        "node": node.node_id, "depth": node.depth,
                        "bound": res.dual_bound, "primal": res.objective,
                        "branch_var": branch_var, "ub": ub, "lb": lb_rec,
                        "gap": max(ub - lb_rec, 0.0) / ub,
                        "integral": res.integral, "pruned": pruned,
                        "support_size": len(res.support),
                        "active_size": len(res.active_set),
                    })
                if log.isEnabledFor(logging.DEBUG):
                    log.debug("node %d depth %d bound %.8f ub %.8f %s",
                              node.node_id, node.depth, res.dual_bound, ub,
                              "pruned" if pruned else
                              ("integral" if res.integral else f"branch {branch_var}"))
    finally:
        if executor is not None:
            executor.shutdown(wait=False)

    lb = min(current_lb(), ub)
    rel_gap = max(ub - lb, 0.0) / ub if ub > 0.0 else 0.0
    wall = time.perf_counter() - t0
    log.info("finished: status=%s objective=%.8f gap=%.3e nodes=%d wall=%.2fs",
             status, ub, rel_gap, nodes_explored, wall)
    return BnBOutcome(beta=inc_beta, objective=ub, lower_bound=lb,
                      rel_gap=rel_gap, nodes_explored=nodes_explored,
                      status=status, wall_time=wall)


def solve_path(data: Dataset, lambda2: float, big_m: float,
               lambda0_grid: Sequence[float],
               settings: SolverSettings | None = None
               ) -> list[tuple[float, BnBOutcome]]:
    """Solve along a decreasing lambda0 grid, warm-starting each run with the
    previous incumbent.  Returns (lambda0, outcome) pairs in solve order."""
    grid = sorted(set(float(v) for v in lambda0_grid), reverse=True)
    if not grid:
        raise ValueError("lambda0_grid is empty")
    out: list[tuple[float, BnBOutcome]] = []
    warm: dict[int, float] | None = None
    for lam0 in grid:
        params = PenaltyParams(lam0, lambda2, big_m)
        res = solve(data, params, settings, warm_start=warm)
        warm = res.beta
        out.append((lam0, res))
    return out
