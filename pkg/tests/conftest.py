"""Shared test helpers."""

import numpy as np
import pytest

from haplosim import MutationRates, RandomStream


@pytest.fixture
def stream():
    return RandomStream(12345)


def symmetric_rates(r, mu):
    return MutationRates.symmetric(r, mu)


def random_rates(rng, r, scale=0.4):
    """Valid random per-locus rates with delta + omega < 1."""
    delta = rng.uniform(0.0, scale, size=r)
    omega = rng.uniform(0.0, scale, size=r)
    return MutationRates(delta, omega)


def merge_sparse_bins(counts_a: dict, counts_b: dict, min_pooled: int = 10):
    """Align two outcome histograms and merge rare cells into one bucket.

    Returns a 2 x B contingency matrix suitable for a two-sample chi-square
    test; cells whose pooled count falls below `min_pooled` are combined.
    """
    keys = sorted(set(counts_a) | set(counts_b))
    big_a, big_b, rest_a, rest_b = [], [], 0, 0
    for key in keys:
        a = counts_a.get(key, 0)
        b = counts_b.get(key, 0)
        if a + b >= min_pooled:
            big_a.append(a)
            big_b.append(b)
        else:
            rest_a += a
            rest_b += b
    if rest_a + rest_b > 0:
        big_a.append(rest_a)
        big_b.append(rest_b)
    return np.array([big_a, big_b], dtype=np.int64)
