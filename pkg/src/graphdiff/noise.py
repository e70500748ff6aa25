"""Forward corruption channels.

Covers Bernoulli edge flips (single step, stepwise schedules, and the
closed-form cumulative flip probability), Poisson/Beta/multinomial
per-element channels, the coupled Gaussian structure-feature model, and
the hybrid channel that flips edges while adding Gaussian feature noise.
Every channel is a pure function of (input, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import as_generator
from .graphs import Graph, pair_count

__all__ = [
    "NoiseSchedule",
    "NoisyGraph",
    "CoupledParams",
    "CoupledState",
    "linear_schedule",
    "bernoulli_flip",
    "apply_schedule",
    "compose_flip_prob",
    "poisson_flip_prob",
    "beta_channel",
    "multinomial_channel",
    "coupled_corrupt",
    "coupled_noise_moments",
    "bernoulli_flip_feature_hybrid",
]


@dataclass(frozen=True)
class NoiseSchedule:
    """Ordered per-step flip probabilities beta_1..beta_T."""

    betas: tuple[float, ...]

    def __post_init__(self):
        if len(self.betas) < 1:
            raise ValueError("schedule needs at least one step")
        betas = tuple(float(b) for b in self.betas)
        if any(not (0.0 <= b <= 1.0) for b in betas):
            raise ValueError("every beta must be in [0, 1]")
        object.__setattr__(self, "betas", betas)

    @property
    def steps(self) -> int:
        return len(self.betas)


def linear_schedule(beta_start: float, beta_end: float, steps: int) -> NoiseSchedule:
    """Linearly interpolated schedule, inclusive of both endpoints."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    for b in (beta_start, beta_end):
        if not (0.0 <= b <= 1.0):
            raise ValueError("schedule endpoints must be in [0, 1]")
    return NoiseSchedule(betas=tuple(np.linspace(beta_start, beta_end, steps)))


@dataclass(frozen=True)
class NoisyGraph:
    """Corrupted adjacency plus the exact number of pairs that differ from the source."""

    n: int
    pairs: np.ndarray
    flip_count: int
    source_m: int

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=bool)
        if pairs.shape != (self.source_m,) or self.source_m != pair_count(self.n):
            raise ValueError("pair vector inconsistent with node count")
        if not (0 <= self.flip_count <= self.source_m):
            raise ValueError("flip_count out of range")
        pairs.setflags(write=False)
        object.__setattr__(self, "pairs", pairs)

    @property
    def observed_edge_count(self) -> int:
        return int(np.count_nonzero(self.pairs))


def bernoulli_flip(g: Graph, beta: float, seed) -> NoisyGraph:
    """Toggle every unordered pair independently with probability beta."""
    if not (0.0 <= beta <= 1.0):
        raise ValueError("beta must be in [0, 1]")
    rng = as_generator(seed)
    mask = rng.random(g.num_pairs) < beta
    return NoisyGraph(
        n=g.n,
        pairs=g.pairs ^ mask,
        flip_count=int(np.count_nonzero(mask)),
        source_m=g.num_pairs,
    )


def apply_schedule(g: Graph, schedule: NoiseSchedule, seed, upto: int | None = None) -> NoisyGraph:
    """Run the stepwise Markov corruption: each step flips the previous state."""
    steps = schedule.steps if upto is None else upto
    if not (1 <= steps <= schedule.steps):
        raise ValueError("upto out of range")
    rng = as_generator(seed)
    state = g.pairs
    for beta in schedule.betas[:steps]:
        state = state ^ (rng.random(g.num_pairs) < beta)
    return NoisyGraph(
        n=g.n,
        pairs=state,
        flip_count=int(np.count_nonzero(state ^ g.pairs)),
        source_m=g.num_pairs,
    )


def compose_flip_prob(schedule: NoiseSchedule, upto: int) -> float:
    """Net probability that a pair differs from its source after ``upto`` steps.

    Propagates the two-state (differs / agrees) chain step by step, which
    equals (1 - prod(1 - 2 beta_i)) / 2 for the symmetric channel.
    """
    if not (1 <= upto <= schedule.steps):
        raise ValueError("upto must be in [1, T]")
    p_diff = 0.0
    p_same = 1.0
    for b in schedule.betas[:upto]:
        p_diff, p_same = p_diff * (1.0 - b) + p_same * b, p_same * (1.0 - b) + p_diff * b
    return p_diff


def poisson_flip_prob(lam: float, t: float) -> float:
    """Flip probability (1 - e^(-2*lam*t)) / 2 of a rate-lam telegraph process."""
    if lam < 0 or t < 0:
        raise ValueError("lam and t must be nonnegative")
    return -0.5 * math.expm1(-2.0 * lam * t)


def beta_channel(x0, t: float, alpha_u: float, beta_u: float, seed):
    """Blend toward Beta(alpha_u, beta_u) noise: (1-t)*x0 + t*U.

    ``x0`` may be a scalar or an array in [0, 1]; one independent U is drawn
    per element.
    """
    if alpha_u <= 0 or beta_u <= 0:
        raise ValueError("Beta shapes must be positive")
    if not (0.0 <= t <= 1.0):
        raise ValueError("t must be in [0, 1]")
    x0 = np.asarray(x0, dtype=float)
    if np.any(x0 < 0) or np.any(x0 > 1):
        raise ValueError("x0 values must be in [0, 1]")
    rng = as_generator(seed)
    u = rng.beta(alpha_u, beta_u, size=x0.shape)
    out = (1.0 - t) * x0 + t * u
    return out if out.shape else float(out)


def multinomial_channel(category, t: float, base_pi, seed):
    """Keep the input category with probability 1-t, else resample from base_pi."""
    if not (0.0 <= t <= 1.0):
        raise ValueError("t must be in [0, 1]")
    base_pi = np.asarray(base_pi, dtype=float)
    if base_pi.ndim != 1 or np.any(base_pi < 0) or abs(base_pi.sum() - 1.0) > 1e-12:
        raise ValueError("base_pi must be a probability vector summing to 1")
    k = base_pi.shape[0]
    category = np.asarray(category, dtype=np.int64)
    if np.any(category < 0) or np.any(category >= k):
        raise ValueError("category index out of range")
    rng = as_generator(seed)
    resample = rng.random(category.shape) < t
    drawn = rng.choice(k, size=category.shape, p=base_pi)
    out = np.where(resample, drawn, category)
    return out if out.shape else int(out)


@dataclass(frozen=True)
class CoupledParams:
    """Scales and coupling of the shared-latent Gaussian channel."""

    sigma_a: float
    sigma_x: float
    gamma: float
    d_f: int

    def __post_init__(self):
        if self.sigma_a < 0 or self.sigma_x < 0:
            raise ValueError("noise scales must be nonnegative")
        if not (0.0 <= self.gamma <= 1.0):
            raise ValueError("gamma must be in [0, 1]")
        if self.d_f < 1:
            raise ValueError("d_f must be >= 1")


@dataclass(frozen=True)
class CoupledState:
    """Jointly corrupted features and real-valued structure."""

    noisy_features: np.ndarray  # (n, d_f)
    noisy_structure: np.ndarray  # (n, n) symmetric, zero diagonal
    latent_summaries: np.ndarray  # (n,) per-node scalar s_i

    def structure_pairs(self) -> np.ndarray:
        n = self.noisy_structure.shape[0]
        iu, ju = np.triu_indices(n, k=1)
        return self.noisy_structure[iu, ju]


def coupled_corrupt(g: Graph, features_x0: np.ndarray, params: CoupledParams, seed) -> CoupledState:
    """Corrupt structure and features with shared per-node latents.

    Per node: eta_i ~ N(0, I_df), s_i = sum(eta_i)/sqrt(d_f).  Features get
    X_i + sigma_x * eta_i; each pair gets
    A_ij + sigma_a * (gamma*(s_i+s_j)/2 + sqrt(1-gamma^2) * xi_ij).
    The latent draws do not depend on gamma, so a fixed seed yields common
    random numbers across a gamma sweep.
    """
    features_x0 = np.asarray(features_x0, dtype=float)
    if features_x0.shape != (g.n, params.d_f):
        raise ValueError(f"features must have shape ({g.n}, {params.d_f})")
    rng = as_generator(seed)
    eta = rng.standard_normal((g.n, params.d_f))
    xi = rng.standard_normal(g.num_pairs)
    s = eta.sum(axis=1) / math.sqrt(params.d_f)

    iu, ju = np.triu_indices(g.n, k=1)
    shared = 0.5 * (s[iu] + s[ju])
    pair_noise = params.sigma_a * (
        params.gamma * shared + math.sqrt(1.0 - params.gamma**2) * xi
    )
    structure = np.zeros((g.n, g.n), dtype=float)
    vals = g.pairs.astype(float) + pair_noise
    structure[iu, ju] = vals
    structure[ju, iu] = vals

    return CoupledState(
        noisy_features=features_x0 + params.sigma_x * eta,
        noisy_structure=structure,
        latent_summaries=s,
    )


def coupled_noise_moments(params: CoupledParams) -> tuple[float, float, float]:
    """Marginal structural variance, per-component feature variance, and a
    lower bound on the smallest eigenvalue of the joint noise covariance."""
    var_struct = params.sigma_a**2 * (1.0 - params.gamma**2 / 2.0)
    var_feat = params.sigma_x**2
    min_eig = min(params.sigma_a**2 * (1.0 - params.gamma**2), params.sigma_x**2)
    return var_struct, var_feat, min_eig


def bernoulli_flip_feature_hybrid(
    g: Graph, beta: float, features_x0: np.ndarray, tau_x: float, seed
) -> tuple[NoisyGraph, np.ndarray]:
    """Flip edges with rate beta and add N(0, tau_x) noise per feature component."""
    if tau_x < 0:
        raise ValueError("tau_x must be nonnegative")
    features_x0 = np.asarray(features_x0, dtype=float)
    if features_x0.ndim != 2 or features_x0.shape[0] != g.n:
        raise ValueError("features must have shape (n, d_f)")
    rng = as_generator(seed)
    noisy = bernoulli_flip(g, beta, rng)
    noisy_features = features_x0 + math.sqrt(tau_x) * rng.standard_normal(features_x0.shape)
    return noisy, noisy_features
