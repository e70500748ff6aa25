"""Seed handling shared by every stochastic operation in the package."""

from __future__ import annotations

import numpy as np


def as_generator(seed) -> np.random.Generator:
    """Accept an integer seed, a SeedSequence, or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    if seed is None:
        raise ValueError("seed is required; stochastic results must be reproducible")
    return np.random.default_rng(int(seed))


def cell_seed(base_seed: int, *key: int) -> np.random.SeedSequence:
    """Derive an independent stream for one experiment cell.

    The mapping depends only on (base_seed, key), never on execution order,
    so sweeps give identical results for any thread count.
    """
    return np.random.SeedSequence(entropy=int(base_seed), spawn_key=tuple(int(k) for k in key))
