"""Candidate screening for the off-support optimality checks.

The contract under test: every brute-force violation is inside the screened
candidate set, and filtering candidates exactly reproduces the brute-force
violation list.
"""

import numpy as np

from l0bb.datasets import SynthSpec, generate, normalize
from l0bb.problem import residual_for
from l0bb.screening import (build_cache, candidate_set, maybe_refresh,
                            screened_violations)


def _setup(seed, n=60, p=120):
    raw = generate(SynthSpec(n=n, p=p, k=5, rho=0.3, corr="constant",
                             snr=5.0, seed=seed))
    return normalize(raw.x, raw.y)


def _brute(data, residual, threshold, ineligible):
    corr = data.x.T @ residual
    out = [i for i in range(data.p)
           if not ineligible[i] and abs(float(corr[i])) > threshold]
    return out


def test_candidates_cover_violations():
    rng = np.random.default_rng(0)
    for seed in range(10):
        data = _setup(seed)
        beta0 = {int(i): float(v) for i, v in
                 zip(rng.choice(data.p, 5, replace=False), rng.normal(size=5))}
        r0 = residual_for(data, beta0)
        cache = build_cache(data, r0)
        # drift the coefficients a little, as CD would
        beta1 = {i: v + 0.05 * rng.normal() for i, v in beta0.items()}
        r1 = residual_for(data, beta1)
        ineligible = np.zeros(data.p, dtype=bool)
        for i in beta1:
            ineligible[i] = True
        threshold = 0.4
        cands = candidate_set(cache, data, r1, threshold, ineligible)
        brute = _brute(data, r1, threshold, ineligible)
        assert set(brute) <= set(int(c) for c in cands)


def test_screened_equals_brute():
    rng = np.random.default_rng(1)
    for seed in range(10):
        data = _setup(seed + 50)
        beta0 = {int(i): float(v) for i, v in
                 zip(rng.choice(data.p, 4, replace=False), rng.normal(size=4))}
        r0 = residual_for(data, beta0)
        cache = build_cache(data, r0)
        beta1 = {i: v + 0.1 * rng.normal() for i, v in beta0.items()}
        r1 = residual_for(data, beta1)
        ineligible = np.zeros(data.p, dtype=bool)
        for i in beta1:
            ineligible[i] = True
        for threshold in (0.2, 0.5, 0.9):
            got, _count = screened_violations(cache, data, r1, threshold,
                                              ineligible)
            assert list(got) == _brute(data, r1, threshold, ineligible)


def test_zero_drift_gives_tight_candidates():
    data = _setup(99)
    beta = {3: 0.4}
    r = residual_for(data, beta)
    cache = build_cache(data, r)
    ineligible = np.zeros(data.p, dtype=bool)
    ineligible[3] = True
    threshold = 0.3
    cands = candidate_set(cache, data, r, threshold, ineligible)
    corr = np.abs(data.x.T @ r)
    want = [i for i in range(data.p) if not ineligible[i] and corr[i] > threshold]
    # with no drift the candidate test |corr| > c - 0 is exact up to ties
    loose = [i for i in range(data.p) if not ineligible[i] and corr[i] >= threshold]
    got = set(int(c) for c in cands)
    assert set(want) <= got <= set(loose)


def test_huge_drift_returns_everything():
    data = _setup(7)
    r0 = residual_for(data, {})
    cache = build_cache(data, r0)
    r_far = r0 + 10.0
    ineligible = np.zeros(data.p, dtype=bool)
    cands = candidate_set(cache, data, r_far, 0.5, ineligible)
    assert len(cands) == data.p


def test_refresh_policy():
    data = _setup(8)
    r0 = residual_for(data, {})
    cache = build_cache(data, r0)
    small = int(cache.eps_gs * data.p)
    assert maybe_refresh(cache, small, data, r0) is cache
    refreshed = maybe_refresh(cache, small + 1, data, r0)
    assert refreshed is not cache


def test_cache_ordering():
    data = _setup(9)
    r = residual_for(data, {1: 0.2})
    cache = build_cache(data, r)
    assert np.all(np.diff(cache.corr_desc) <= 1e-15)
    corr = np.abs(data.x.T @ r)
    np.testing.assert_allclose(cache.corr_desc, np.sort(corr)[::-1],
                               atol=1e-12)
