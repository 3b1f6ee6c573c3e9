"""Dataset container, node bookkeeping, and objective evaluation."""

import math

import numpy as np
import pytest

from l0bb._kernels import PenaltyParams
from l0bb.datasets import SynthSpec, generate, normalize, scale_coefficients
from l0bb.problem import (NodeState, objective_full, objective_relaxation,
                          recover_zs, residual_for)


def _data(seed=0, n=40, p=12):
    raw = generate(SynthSpec(n=n, p=p, k=3, rho=0.2, corr="constant",
                             snr=5.0, seed=seed))
    return normalize(raw.x, raw.y)


def test_dataset_requires_normalized_inputs():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((30, 5))
    y = rng.standard_normal(30)
    from l0bb.problem import Dataset
    with pytest.raises(ValueError, match="normalize"):
        Dataset(x=np.asfortranarray(x), y=y, column_norms=np.ones(5),
                y_norm=1.0)


def test_normalize_properties():
    data = _data()
    norms = np.linalg.norm(data.x, axis=0)
    np.testing.assert_allclose(norms, 1.0, atol=1e-9)
    assert abs(np.linalg.norm(data.y) - 1.0) < 1e-9
    assert abs(float(np.sum(data.y))) < 1e-9  # centered
    np.testing.assert_allclose(data.x.sum(axis=0), 0.0, atol=1e-9)
    assert data.x.flags.f_contiguous


def test_xty_cached():
    data = _data()
    a = data.xty
    b = data.xty
    assert a is b
    np.testing.assert_allclose(a, data.x.T @ data.y)


def test_unit_conversion_roundtrip():
    data = _data()
    beta = {2: 0.3, 7: -1.1}
    orig = data.to_original_units(beta)
    dense = np.zeros(data.p)
    for i, v in orig.items():
        dense[i] = v
    back = scale_coefficients(data, dense)
    for i in beta:
        assert abs(back[i] - beta[i]) < 1e-12


def test_intercept():
    raw = generate(SynthSpec(n=50, p=8, k=2, rho=0.0, corr="constant",
                             snr=math.inf, seed=5))
    data = normalize(raw.x, raw.y)
    beta_orig = data.to_original_units({0: 0.5})
    icpt = data.intercept_for(beta_orig)
    expect = raw.y.mean() - sum(v * raw.x[:, i].mean()
                                for i, v in beta_orig.items())
    assert abs(icpt - expect) < 1e-9


def test_node_state_checks():
    node = NodeState(node_id=0, depth=0, fixed_zero=(1,), fixed_one=(2,),
                     warm_start={2: 0.5}, active_set=(0, 2, 3))
    node.check(5)
    with pytest.raises(ValueError):
        NodeState(node_id=0, depth=0, fixed_zero=(1,), fixed_one=(1,),
                  active_set=(1,)).check(5)
    with pytest.raises(ValueError):
        # warm start touching a coordinate fixed to zero
        NodeState(node_id=0, depth=0, fixed_zero=(1,), warm_start={1: 1.0},
                  active_set=()).check(5)
    with pytest.raises(ValueError):
        # fixed-one coordinate missing from the active set
        NodeState(node_id=0, depth=0, fixed_one=(3,), active_set=(0,)).check(5)
    with pytest.raises(ValueError):
        NodeState(node_id=0, depth=0, fixed_zero=(9,), active_set=()).check(5)


def test_objective_full_counts_strict_nonzeros():
    data = _data()
    pm = PenaltyParams(0.1, 0.01, 10.0)
    base = objective_full(data, {}, pm)
    assert abs(base - 0.5 * float(data.y @ data.y)) < 1e-15
    with_zero = objective_full(data, {3: 0.0}, pm)
    assert with_zero == base  # an explicit zero carries no selection charge


def test_objective_relaxation_charges_fixed_one_at_zero():
    data = _data()
    pm = PenaltyParams(0.1, 0.01, 10.0)
    a = objective_relaxation(data, {}, pm, fixed_one=())
    b = objective_relaxation(data, {}, pm, fixed_one=(4,))
    assert abs((b - a) - pm.lambda0) < 1e-15


def test_residual_for():
    data = _data()
    beta = {0: 0.5, 3: -0.2}
    r = residual_for(data, beta)
    want = data.y - 0.5 * data.x[:, 0] + 0.2 * data.x[:, 3]
    np.testing.assert_allclose(r, want, atol=1e-12)


def test_recover_zs_regimes():
    pm = PenaltyParams(1.0, 1.0, 10.0)  # knee = 1
    z, s = recover_zs({0: 0.5, 1: 2.0}, pm)
    assert abs(z[0] - 0.5) < 1e-15 and abs(s[0] - 0.5) < 1e-15
    assert z[1] == 1.0 and abs(s[1] - 4.0) < 1e-15
    # penalty value must match lambda0 z + lambda2 s coordinatewise
    for i, b in ((0, 0.5), (1, 2.0)):
        assert abs(pm.value_free(b) - (pm.lambda0 * z[i] + pm.lambda2 * s[i])) < 1e-12
    # conic and box feasibility
    for i, b in ((0, 0.5), (1, 2.0)):
        assert b * b <= s[i] * z[i] + 1e-12
        assert 0.0 <= z[i] <= 1.0


def test_recover_zs_l1_and_fixed():
    pm = PenaltyParams(1.0, 0.01, 1.0)  # knee = 10 > M, pure l1 regime
    z, s = recover_zs({0: 0.5, 2: -0.25}, pm, fixed_one=(1,))
    assert abs(z[0] - 0.5) < 1e-15
    assert abs(s[0] - 0.5) < 1e-15
    assert abs(z[2] - 0.25) < 1e-15
    assert z[1] == 1.0 and s[1] == 0.0
    assert abs(pm.value_free(0.5) - (pm.lambda0 * z[0] + pm.lambda2 * s[0])) < 1e-12
