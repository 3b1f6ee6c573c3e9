"""Coordinate descent node solver with active sets."""

import math

import numpy as np
import pytest

from l0bb._kernels import ElasticNetParams, PenaltyParams
from l0bb.config import SolverSettings
from l0bb.datasets import SynthSpec, generate, lambda0_max, normalize
from l0bb.problem import NodeState, objective_relaxation
from l0bb.relaxation import solve_node

TIGHT = SolverSettings(pd_gap=1e-6, cd_tolerance=1e-12)


def _data(seed, n=50, p=60):
    raw = generate(SynthSpec(n=n, p=p, k=4, rho=0.3, corr="constant",
                             snr=5.0, seed=seed))
    return normalize(raw.x, raw.y)


def _root(p, warm=None, active=None):
    return NodeState(node_id=0, depth=0, warm_start=dict(warm or {}),
                     active_set=tuple(range(p)) if active is None else active)


def test_no_violations_at_return():
    for seed in range(5):
        data = _data(seed)
        params = PenaltyParams(0.05 * lambda0_max(data, 0.1), 0.1, math.inf)
        res = solve_node(data, params, _root(data.p), TIGHT)
        corr = np.abs(data.x.T @ res.residual)
        off = np.ones(data.p, dtype=bool)
        for i in res.support:
            off[i] = False
        assert float(np.max(corr[off], initial=0.0)) <= params.zero_threshold + 1e-9


def test_active_set_growth_matches_full_start():
    data = _data(11)
    params = PenaltyParams(0.05 * lambda0_max(data, 0.1), 0.1, math.inf)
    small = solve_node(data, params, _root(data.p, active=()), TIGHT)
    full = solve_node(data, params, _root(data.p), TIGHT)
    assert abs(small.objective - full.objective) < 1e-9


def test_warm_start_agnostic():
    data = _data(12)
    params = PenaltyParams(0.05 * lambda0_max(data, 0.05), 0.05, math.inf)
    cold = solve_node(data, params, _root(data.p), TIGHT)
    warm = solve_node(data, params, _root(data.p, warm=cold.beta), TIGHT)
    rng = np.random.default_rng(0)
    junk = {int(i): float(rng.normal()) for i in rng.choice(data.p, 6,
                                                            replace=False)}
    mess = solve_node(data, params, _root(data.p, warm=junk), TIGHT)
    assert abs(cold.objective - warm.objective) < 1e-8
    assert abs(cold.objective - mess.objective) < 1e-8


def test_fixed_sets_respected():
    data = _data(13)
    params = PenaltyParams(0.03 * lambda0_max(data, 0.1), 0.1, math.inf)
    base = solve_node(data, params, _root(data.p), TIGHT)
    pick = base.support[0]
    node = NodeState(node_id=1, depth=1, fixed_zero=(pick,),
                     active_set=tuple(i for i in range(data.p) if i != pick))
    res0 = solve_node(data, params, node, TIGHT)
    assert pick not in res0.beta
    assert res0.objective >= base.objective - 1e-10
    other = base.support[1]
    node1 = NodeState(node_id=2, depth=1, fixed_one=(other,),
                      active_set=tuple(range(data.p)))
    res1 = solve_node(data, params, node1, TIGHT)
    assert other in res1.active_set
    # relaxation with a forced-in coordinate charges it fully
    check = objective_relaxation(data, res1.beta, params, fixed_one=(other,))
    assert abs(check - res1.objective) < 1e-9


def test_certified_gap():
    for seed in range(4):
        data = _data(30 + seed)
        params = PenaltyParams(0.05 * lambda0_max(data, 0.1), 0.1,
                               (math.inf, 1.0, 0.25, 0.1)[seed % 4])
        res = solve_node(data, params, _root(data.p), TIGHT)
        gap = res.objective - res.dual_bound
        assert gap >= 0.0
        assert gap <= 1e-5 * max(1.0, abs(res.objective))


def test_objective_recheck():
    data = _data(17)
    params = PenaltyParams(0.05 * lambda0_max(data, 0.1), 0.1, 0.5)
    res = solve_node(data, params, _root(data.p), TIGHT)
    again = objective_relaxation(data, res.beta, params)
    assert abs(again - res.objective) < 1e-10


def test_box_respected():
    data = _data(18)
    params = PenaltyParams(0.02 * lambda0_max(data, 0.05), 0.05, 0.15)
    res = solve_node(data, params, _root(data.p), TIGHT)
    assert res.beta
    assert max(abs(v) for v in res.beta.values()) <= 0.15 + 1e-12


def test_integrality_detection():
    data = _data(19)
    lam2 = 0.1
    # a huge charge forces the all-zero solution, which is integral
    params = PenaltyParams(10.0 * lambda0_max(data, lam2), lam2, 1e-3)
    res = solve_node(data, params, _root(data.p), TIGHT)
    assert res.beta == {}
    assert res.integral
    assert res.z == {}


def test_elastic_solver_reused_for_box_relaxation():
    data = _data(20)
    en = ElasticNetParams(l1=0.05, l2=0.1, big_m=0.5)
    res = solve_node(data, en, _root(data.p), TIGHT)
    # stationarity of the elastic net solution on its interior support
    for i, v in res.beta.items():
        if abs(v) >= 0.5 - 1e-9:
            continue  # box bound active, only an inequality holds there
        grad = -float(data.x[:, i] @ res.residual) + 2 * 0.1 * v
        assert abs(grad + 0.05 * math.copysign(1.0, v)) < 1e-6
    assert res.dual_bound == -math.inf
    assert not res.integral


def test_screening_audit_smoke():
    data = _data(21, n=60, p=150)
    params = PenaltyParams(0.05 * lambda0_max(data, 0.1), 0.1, math.inf)
    audited = SolverSettings(pd_gap=1e-6, cd_tolerance=1e-12,
                             screening="on", screening_audit=True)
    res_on = solve_node(data, params, _root(data.p), audited)
    res_off = solve_node(data, params, _root(data.p), TIGHT)
    assert abs(res_on.objective - res_off.objective) < 1e-12
    assert res_on.support == res_off.support
