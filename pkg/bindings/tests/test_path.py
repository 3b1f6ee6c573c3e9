"""Behavior of the lambda0-grid entry point."""

import numpy as np

from l0bb_bindings import fit, fit_path, generate_synthetic


def test_empty_grid():
    x, y, _ = generate_synthetic(n=30, p=8, k=2, seed=1)
    assert fit_path(x, y, []) == []


def test_singleton_grid_matches_fit():
    x, y, _ = generate_synthetic(n=50, p=12, k=3, seed=2)
    single = fit(x, y, lambda0=0.04, lambda2=0.01, gap=1e-6)
    path = fit_path(x, y, [0.04], lambda2=0.01, gap=1e-6)
    assert len(path) == 1
    assert path[0].objective == single.objective
    assert path[0].support == single.support
    assert path[0].lambda0 == 0.04


def test_grid_ordering_and_monotonicity():
    x, y, _ = generate_synthetic(n=60, p=15, k=3, rho=0.2, snr=8.0, seed=4)
    handles = fit_path(x, y, [0.02, 0.2, 0.06], lambda2=0.01, gap=1e-6)
    assert len(handles) == 3
    lams = [h.lambda0 for h in handles]
    assert lams == sorted(lams, reverse=True)
    objs = [h.objective for h in handles]
    assert objs == sorted(objs, reverse=True)
    sizes = [len(h.support) for h in handles]
    assert sizes == sorted(sizes)
