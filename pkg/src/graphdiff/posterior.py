"""Posteriors over noise parameters: exact conjugate forms, a grid-quadrature
oracle for general priors, moment estimators, and the heterogeneity-adjusted
concentration exponent for power-law graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import as_generator
from .graphs import Graph

__all__ = [
    "BetaPosterior",
    "PriorSpec",
    "beta_posterior",
    "posterior_mean_estimator",
    "variance_asymptotic",
    "posterior_grid_oracle",
    "estimate_tau_x",
    "scale_free_exponent",
    "dependent_flip_variance_check",
]


@dataclass(frozen=True)
class BetaPosterior:
    """Conjugate posterior Beta(a, b) over a flip rate."""

    a: float
    b: float
    prior: tuple[float, float]

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("shape parameters must be positive")

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)

    @property
    def variance(self) -> float:
        s = self.a + self.b
        return self.a * self.b / (s * s * (s + 1.0))


def beta_posterior(flips: int, m: int, alpha0: float = 1.0, beta0: float = 1.0) -> BetaPosterior:
    """Exact conjugate update from ``flips`` toggled pairs out of ``m``."""
    if alpha0 <= 0 or beta0 <= 0:
        raise ValueError("prior shapes must be positive")
    if not (0 <= flips <= m):
        raise ValueError("need 0 <= flips <= m")
    return BetaPosterior(a=flips + alpha0, b=m - flips + beta0, prior=(alpha0, beta0))


def posterior_mean_estimator(flips: int, m: int) -> float:
    """Posterior mean (flips + 1) / (m + 2) under the uniform prior."""
    if not (0 <= flips <= m):
        raise ValueError("need 0 <= flips <= m")
    return (flips + 1) / (m + 2)


def variance_asymptotic(beta_true: float, m: int) -> float:
    """Leading posterior-variance term beta*(1-beta)/m.

    Boundary rates are rejected: the per-trial Fisher information
    1/(beta*(1-beta)) diverges there.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if not (0.0 < beta_true < 1.0):
        raise ValueError("beta_true must be strictly inside (0, 1)")
    return beta_true * (1.0 - beta_true) / m


@dataclass(frozen=True)
class PriorSpec:
    """Prior over the flip rate: conjugate Beta shapes or a tabulated density."""

    kind: str
    shapes: tuple[float, float] | None = None
    grid: np.ndarray | None = None
    density: np.ndarray | None = None

    @classmethod
    def beta(cls, alpha0: float = 1.0, beta0: float = 1.0) -> "PriorSpec":
        if alpha0 <= 0 or beta0 <= 0:
            raise ValueError("prior shapes must be positive")
        return cls(kind="beta_conjugate", shapes=(alpha0, beta0))

    @classmethod
    def tabulated(cls, grid, density) -> "PriorSpec":
        grid = np.asarray(grid, dtype=float)
        density = np.asarray(density, dtype=float)
        if grid.ndim != 1 or grid.shape != density.shape or grid.size < 2:
            raise ValueError("grid and density must be matching 1-d arrays")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(density < 0):
            raise ValueError("density must be nonnegative")
        total = float(np.trapezoid(density, grid))
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"tabulated density integrates to {total}, not 1")
        return cls(kind="tabulated", grid=grid, density=density)

    def log_density(self, beta: np.ndarray) -> np.ndarray:
        if self.kind == "beta_conjugate":
            a0, b0 = self.shapes
            with np.errstate(divide="ignore", invalid="ignore"):
                out = (a0 - 1.0) * np.log(beta) + (b0 - 1.0) * np.log1p(-beta)
            # uniform prior contributes 0 everywhere, including the endpoints
            out = np.where(np.isnan(out), 0.0, out)
            return out - (math.lgamma(a0) + math.lgamma(b0) - math.lgamma(a0 + b0))
        vals = np.interp(beta, self.grid, self.density, left=0.0, right=0.0)
        with np.errstate(divide="ignore"):
            return np.log(vals)


def posterior_grid_oracle(
    flips: int, m: int, prior: PriorSpec, grid_size: int = 40001
) -> tuple[float, float]:
    """Trapezoid-quadrature posterior mean/variance for an arbitrary prior.

    The likelihood is accumulated in log space with max-subtraction, so it
    stays finite up to m ~ 1e4.  Serves as the independent oracle for the
    conjugate closed form.
    """
    if grid_size < 1000:
        raise ValueError("grid_size must be >= 1000")
    if m > 10**4:
        raise ValueError("oracle is rated for m <= 1e4")
    if not (0 <= flips <= m):
        raise ValueError("need 0 <= flips <= m")
    beta = np.linspace(0.0, 1.0, grid_size)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_like = np.where(flips > 0, flips * np.log(beta), 0.0)
        log_like += np.where(m - flips > 0, (m - flips) * np.log1p(-beta), 0.0)
    log_post = log_like + prior.log_density(beta)
    log_post[np.isnan(log_post)] = -np.inf
    finite = log_post[np.isfinite(log_post)]
    if finite.size == 0:
        raise ArithmeticError("posterior vanishes on the whole grid (non-normalizable prior?)")
    w = np.exp(log_post - finite.max())
    z = float(np.trapezoid(w, beta))
    if not (z > 0.0 and math.isfinite(z)):
        raise ArithmeticError("posterior normalization failed")
    mean = float(np.trapezoid(beta * w, beta)) / z
    second = float(np.trapezoid(beta * beta * w, beta)) / z
    return mean, second - mean * mean


def estimate_tau_x(noisy_features: np.ndarray) -> float:
    """Feature-noise variance estimate: sample variance minus the unit
    variance of the clean components, clamped at zero."""
    flat = np.asarray(noisy_features, dtype=float).ravel()
    if flat.size < 2:
        raise ValueError("need at least 2 feature components")
    return max(0.0, float(flat.var(ddof=1)) - 1.0)


def scale_free_exponent(alpha: float) -> float:
    """Predicted decay exponent (alpha-2)/(alpha-1) of the posterior variance
    on power-law graphs; approaches 1 for homogeneous degrees."""
    if not alpha > 2.0:
        raise ValueError("alpha must be > 2")
    return (alpha - 2.0) / (alpha - 1.0)


def dependent_flip_variance_check(
    g: Graph,
    beta: float,
    dependency_degree: int,
    trials: int,
    seed,
    mixing: float = 0.5,
) -> tuple[float, float]:
    """Empirical Var(K) under locally dependent flips versus the i.i.d. value.

    Pairs are grouped into blocks of size dependency_degree+1; each non-hub
    member copies its block hub's flip decision with probability ``mixing``.
    The dependency graph then has bounded degree, and Var(K) stays Theta(M)
    with an inflation factor controlled by the degree.
    """
    if dependency_degree < 0:
        raise ValueError("dependency_degree must be >= 0")
    if trials < 100:
        raise ValueError("need at least 100 trials")
    if not (0.0 <= beta <= 1.0):
        raise ValueError("beta must be in [0, 1]")
    if not (0.0 <= mixing <= 1.0):
        raise ValueError("mixing must be in [0, 1]")
    rng = as_generator(seed)
    m = g.num_pairs
    base = rng.random((trials, m)) < beta
    if dependency_degree == 0:
        flips = base
    else:
        block = dependency_degree + 1
        hub_of = (np.arange(m) // block) * block
        copy = rng.random((trials, m)) < mixing
        copy[:, 0::block] = False  # hubs keep their own draw
        flips = np.where(copy, base[:, hub_of], base)
    counts = flips.sum(axis=1)
    empirical = float(counts.var(ddof=1))
    iid = m * beta * (1.0 - beta)
    return empirical, iid
