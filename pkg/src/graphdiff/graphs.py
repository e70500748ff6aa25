"""Seeded random-graph generators and degree statistics.

Graphs are undirected and simple.  The adjacency is stored as one boolean
per unordered node pair in row-major upper-triangle order, which keeps a
graph with ten million potential edges around 10 MB and makes whole-graph
corruption a single vectorized pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._rng import as_generator

__all__ = [
    "Graph",
    "SbmSpec",
    "PowerLawSpec",
    "pair_count",
    "pair_index",
    "generate_er",
    "generate_sbm",
    "generate_powerlaw",
    "degree_moments",
]


def pair_count(n: int) -> int:
    """Number of unordered node pairs of an n-node simple graph."""
    return n * (n - 1) // 2


def pair_index(n: int, i, j):
    """Flat upper-triangle index of pair (i, j) with i < j (vectorized).

    Row-major: pairs (0,1), (0,2), ..., (0,n-1), (1,2), ... which matches
    ``np.triu_indices(n, k=1)`` ordering.
    """
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    return i * (n - 1) - (i * (i + 1)) // 2 + (j - 1)


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph over ``n`` nodes.

    ``pairs`` holds one bool per unordered pair in upper-triangle order;
    symmetry and an empty diagonal are therefore structural.
    """

    n: int
    pairs: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one node")
        pairs = np.asarray(self.pairs, dtype=bool)
        if pairs.shape != (pair_count(self.n),):
            raise ValueError(
                f"pair vector has shape {pairs.shape}, expected ({pair_count(self.n)},)"
            )
        pairs.setflags(write=False)
        object.__setattr__(self, "pairs", pairs)

    @property
    def num_pairs(self) -> int:
        return self.pairs.shape[0]

    @cached_property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self.pairs))

    @property
    def density_p0(self) -> float:
        return self.edge_count / self.num_pairs if self.num_pairs else 0.0

    def adjacency(self) -> np.ndarray:
        """Dense symmetric boolean matrix (intended for small graphs)."""
        a = np.zeros((self.n, self.n), dtype=bool)
        iu, ju = np.triu_indices(self.n, k=1)
        a[iu, ju] = self.pairs
        a[ju, iu] = self.pairs
        return a

    def degrees(self) -> np.ndarray:
        """Per-node degrees, computed row by row without densifying."""
        deg = np.zeros(self.n, dtype=np.int64)
        off = 0
        for i in range(self.n - 1):
            width = self.n - 1 - i
            row = self.pairs[off : off + width]
            deg[i] += int(np.count_nonzero(row))
            deg[i + 1 :] += row
            off += width
        return deg


@dataclass(frozen=True)
class SbmSpec:
    """Stochastic block model with near-equal contiguous communities."""

    n: int
    k: int = 3
    p_intra: float = 0.3
    p_inter: float = 0.05

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.k < 1 or self.k > self.n:
            raise ValueError("k must be in [1, n]")
        if not (0.0 <= self.p_inter <= self.p_intra <= 1.0):
            raise ValueError("need 0 <= p_inter <= p_intra <= 1")

    def community_sizes(self) -> list[int]:
        base, extra = divmod(self.n, self.k)
        return [base + (1 if c < extra else 0) for c in range(self.k)]

    def community_labels(self) -> np.ndarray:
        return np.repeat(np.arange(self.k), self.community_sizes())


@dataclass(frozen=True)
class PowerLawSpec:
    """Degree-sequence target P(k) ~ k^-alpha on [k_min, n-1]."""

    n: int
    alpha: float
    k_min: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not self.alpha > 2.0:
            raise ValueError("alpha must be > 2 (finite mean degree)")
        if not (1 <= self.k_min <= self.n - 1):
            raise ValueError("k_min must be in [1, n-1]")


def generate_er(n: int, p_edge: float, seed) -> Graph:
    """Erdos-Renyi G(n, p): each unordered pair present independently."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if not (0.0 <= p_edge <= 1.0):
        raise ValueError("p_edge must be in [0, 1]")
    rng = as_generator(seed)
    pairs = rng.random(pair_count(n)) < p_edge
    return Graph(n=n, pairs=pairs)


def generate_sbm(spec: SbmSpec, seed) -> Graph:
    """Sample an SBM graph; intra-community pairs use p_intra, others p_inter."""
    rng = as_generator(seed)
    labels = spec.community_labels()
    m = pair_count(spec.n)
    u = rng.random(m)
    pairs = np.empty(m, dtype=bool)
    off = 0
    for i in range(spec.n - 1):
        width = spec.n - 1 - i
        same = labels[i + 1 :] == labels[i]
        threshold = np.where(same, spec.p_intra, spec.p_inter)
        pairs[off : off + width] = u[off : off + width] < threshold
        off += width
    return Graph(n=spec.n, pairs=pairs)


def sample_powerlaw_degrees(spec: PowerLawSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw a degree sequence from the discrete power law, evened to an admissible sum."""
    support = np.arange(spec.k_min, spec.n, dtype=np.int64)
    weights = support.astype(float) ** (-spec.alpha)
    probs = weights / weights.sum()
    degrees = rng.choice(support, size=spec.n, p=probs)
    if degrees.sum() % 2 == 1:
        # odd stub total: bump one uniformly chosen node that still has headroom
        while True:
            v = int(rng.integers(spec.n))
            if degrees[v] < spec.n - 1:
                degrees[v] += 1
                break
    return degrees


def generate_powerlaw(spec: PowerLawSpec, seed) -> Graph:
    """Configuration-model wiring of a power-law degree sequence.

    Self-loops and multi-edges from the random matching are discarded, so
    realized degrees sit slightly below the sampled sequence for heavy hubs.
    """
    rng = as_generator(seed)
    degrees = sample_powerlaw_degrees(spec, rng)
    stubs = np.repeat(np.arange(spec.n, dtype=np.int64), degrees)
    rng.shuffle(stubs)
    u = stubs[0::2]
    v = stubs[1::2]
    keep = u != v
    lo = np.minimum(u[keep], v[keep])
    hi = np.maximum(u[keep], v[keep])
    pairs = np.zeros(pair_count(spec.n), dtype=bool)
    pairs[pair_index(spec.n, lo, hi)] = True  # duplicates collapse here
    return Graph(n=spec.n, pairs=pairs)


def degree_moments(g: Graph) -> tuple[float, float, int]:
    """(mean degree, second moment of degree, max degree), exact over realized degrees."""
    deg = g.degrees().astype(float)
    return float(deg.mean()), float((deg**2).mean()), int(deg.max())
