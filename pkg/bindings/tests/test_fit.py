"""Behavior of the in-memory fit entry point."""

import numpy as np
import pytest

from l0bb_bindings import fit, generate_synthetic


def test_validation_errors():
    x = np.zeros((10, 3))
    y = np.zeros(10)
    with pytest.raises(ValueError, match="2-d"):
        fit(np.zeros(10), y)
    with pytest.raises(ValueError, match="1-d"):
        fit(x, np.zeros((10, 1)))
    with pytest.raises(ValueError, match="rows"):
        fit(x, np.zeros(9))
    bad = x.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ValueError, match="finite"):
        fit(bad, np.arange(10.0))
    with pytest.raises(TypeError, match="unexpected setting"):
        fit(x, np.arange(10.0), bogus_knob=3)


def test_fit_returns_consistent_handle():
    x, y, support = generate_synthetic(n=60, p=15, k=3, rho=0.2, snr=8.0, seed=5)
    handle = fit(x, y, lambda0=0.05, lambda2=0.01, gap=1e-6)
    assert handle.status == "converged"
    assert handle.node_count >= 1
    assert handle.lower_bound <= handle.objective + 1e-12
    assert 0.0 <= handle.gap <= 1e-6 + 1e-12
    coef = handle.coefficients
    assert coef.shape == (15,)
    assert set(np.flatnonzero(coef)) == set(handle.support)
    # strong planted signal at a moderate penalty: support recovered
    assert set(handle.support) == set(support)


def test_huge_lambda0_gives_empty_model():
    x, y, _ = generate_synthetic(n=40, p=10, k=2, seed=3)
    handle = fit(x, y, lambda0=10.0, lambda2=0.01)
    assert handle.support == ()
    assert not handle.coefficients.any()
    assert handle.status == "converged"
    # normalized response has unit norm, so the empty model costs exactly 1/2
    assert abs(handle.objective - 0.5) <= 1e-12


def test_layout_does_not_matter():
    x, y, _ = generate_synthetic(n=50, p=12, k=3, seed=9)
    c_order = np.ascontiguousarray(x)
    f_order = np.asfortranarray(x)
    a = fit(c_order, y, lambda0=0.03, lambda2=0.01, gap=1e-6)
    b = fit(f_order, y, lambda0=0.03, lambda2=0.01, gap=1e-6)
    assert a.objective == b.objective
    assert a.support == b.support
    np.testing.assert_array_equal(a.coefficients, b.coefficients)


def test_node_limit_reported():
    x, y, _ = generate_synthetic(n=50, p=30, k=8, rho=0.3, snr=2.0, seed=11)
    handle = fit(x, y, lambda0=1e-3, lambda2=1e-4, gap=1e-9, nodes_limit=1)
    assert handle.status == "node_limit"
    assert handle.node_count <= 1
