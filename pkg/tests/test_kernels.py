"""Scalar penalty and prox kernels."""

import math

import numpy as np
import pytest

from l0bb._kernels import (ElasticNetParams, PenaltyParams, REGIME_HUBER,
                           REGIME_L1, box_soft_threshold, reverse_huber)


def test_reverse_huber_shape():
    assert reverse_huber(0.0) == 0.0
    assert reverse_huber(0.5) == 0.5
    assert reverse_huber(-0.5) == 0.5
    assert reverse_huber(1.0) == 1.0
    assert reverse_huber(2.0) == (4.0 + 1.0) / 2.0
    assert reverse_huber(-3.0) == 5.0


def test_box_soft_threshold():
    assert box_soft_threshold(0.5, 1.0, 10.0) == 0.0
    assert box_soft_threshold(-0.5, 1.0, 10.0) == 0.0
    assert box_soft_threshold(3.0, 1.0, 10.0) == 2.0
    assert box_soft_threshold(-3.0, 1.0, 10.0) == -2.0
    assert box_soft_threshold(30.0, 1.0, 10.0) == 10.0
    assert box_soft_threshold(4.0, 0.0, math.inf) == 4.0


def test_param_validation():
    with pytest.raises(ValueError):
        PenaltyParams(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        PenaltyParams(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        PenaltyParams(1.0, -1e-9, 1.0)
    with pytest.raises(ValueError):
        PenaltyParams(1.0, 1.0, 0.0)
    # no ridge and no box leaves the problem without a usable relaxation
    with pytest.raises(ValueError):
        PenaltyParams(1.0, 0.0, math.inf)
    PenaltyParams(1.0, 0.0, 5.0)
    PenaltyParams(1.0, 1.0, math.inf)


def test_regime_selection():
    assert PenaltyParams(1.0, 1.0, 10.0).regime == REGIME_HUBER
    assert PenaltyParams(1.0, 1.0, 1.0).regime == REGIME_HUBER  # tie
    assert PenaltyParams(1.0, 1.0, 0.5).regime == REGIME_L1
    assert PenaltyParams(1.0, 0.0, 2.0).regime == REGIME_L1
    assert PenaltyParams(4.0, 1.0, math.inf).regime == REGIME_HUBER


def test_worked_prox_values():
    pm = PenaltyParams(1.0, 1.0, 10.0)
    assert pm.prox_free(1.5) == 0.0
    assert abs(pm.prox_free(4.0) - 4.0 / 3.0) < 1e-12
    pm2 = PenaltyParams(1.0, 0.01, 1.0)
    assert abs(pm2.prox_free(2.0) - 0.99) < 1e-12


def test_worked_penalty_values():
    pm = PenaltyParams(1.0, 1.0, 10.0)
    assert abs(pm.value_free(0.5) - 1.0) < 1e-15
    assert abs(pm.value_free(2.0) - (1.0 + 4.0)) < 1e-15
    pm2 = PenaltyParams(1.0, 0.01, 1.0)
    assert abs(pm2.value_free(0.5) - 0.505) < 1e-15
    pm3 = PenaltyParams(0.012, 0.0409, 10.0)
    assert abs(pm3.value_fixed(1.0) - 0.0529) < 1e-15


def test_penalty_is_even_and_monotone():
    rng = np.random.default_rng(0)
    for _ in range(200):
        pm = PenaltyParams(10 ** rng.uniform(-2, 0), 10 ** rng.uniform(-2, 1),
                           10 ** rng.uniform(-1, 1))
        a, b = sorted(rng.uniform(0, 3, size=2))
        assert pm.value_free(a) == pm.value_free(-a)
        assert pm.value_free(a) <= pm.value_free(b) + 1e-15


def test_prox_optimality_small_sample():
    """The prox output must beat a dense grid of feasible alternatives."""
    rng = np.random.default_rng(1)
    for _ in range(100):
        lam2 = 0.0 if rng.random() < 0.2 else 10 ** rng.uniform(-2, 1)
        big_m = 10 ** rng.uniform(-1, 1) if (lam2 == 0.0 or rng.random() < 0.5) else math.inf
        pm = PenaltyParams(10 ** rng.uniform(-2, 0), lam2, big_m)
        bt = float(rng.normal(scale=3.0))
        star = pm.prox_free(bt)
        assert abs(star) <= pm.big_m

        def q(b):
            return 0.5 * (b - bt) ** 2 + pm.value_free(b)

        hi = min(abs(bt) + 1.0, pm.big_m)
        grid = np.linspace(-hi, hi, 4001)
        assert q(star) <= float(np.min([q(g) for g in grid])) + 1e-9


def test_prox_zero_threshold():
    pm = PenaltyParams(0.5, 0.2, 10.0)
    c = pm.zero_threshold
    assert pm.prox_free(0.999 * c) == 0.0
    assert pm.prox_free(-0.999 * c) == 0.0
    assert pm.prox_free(1.001 * c) != 0.0
    pm2 = PenaltyParams(0.5, 0.2, 0.3)
    c2 = pm2.zero_threshold
    assert abs(c2 - (0.5 / 0.3 + 0.2 * 0.3)) < 1e-15
    assert pm2.prox_free(0.999 * c2) == 0.0


def test_fixed_prox_is_box_ridge():
    pm = PenaltyParams(1.0, 0.5, 2.0)
    # minimizing 0.5 (b - t)^2 + lam2 b^2 gives t / (1 + 2 lam2), clipped
    assert abs(pm.prox_fixed(1.0) - 0.5) < 1e-15
    assert pm.prox_fixed(100.0) == 2.0
    assert pm.prox_fixed(-100.0) == -2.0


def test_elastic_params():
    en = ElasticNetParams(l1=0.3, l2=0.1, big_m=1.5)
    # soft threshold then ridge shrink then clip
    want = (2.0 - 0.3) / (1.0 + 0.2)
    assert abs(en.prox_free(2.0) - want) < 1e-15
    assert en.prox_free(0.2) == 0.0
    assert en.prox_free(100.0) == 1.5
    assert abs(en.value_free(0.5) - (0.3 * 0.5 + 0.1 * 0.25)) < 1e-15
    with pytest.raises(TypeError):
        en.value_fixed(1.0)
    with pytest.raises(TypeError):
        en.prox_fixed(1.0)
