"""Bayesian denoising targets and their deviation metrics.

The conditional target knows the true corruption level; the unconditional
target plugs in the posterior-mean estimate inferred from the corrupted
state itself.  Deviations between the two are the measurand behind the
single-step scaling experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import pair_count
from .noise import NoisyGraph
from .posterior import beta_posterior

__all__ = [
    "TargetField",
    "DeviationReport",
    "edge_posterior_conditional",
    "conditional_target",
    "unconditional_target",
    "target_deviation",
    "feature_target",
    "multinomial_posterior",
    "beta_noise_posterior_mean",
    "lipschitz_probe",
]


@dataclass(frozen=True)
class TargetField:
    """Per-pair edge probabilities (flat upper-triangle layout) plus an
    optional per-node feature target block."""

    n: int
    pair_probs: np.ndarray
    feature_block: np.ndarray | None = None

    def __post_init__(self):
        probs = np.asarray(self.pair_probs, dtype=float)
        if probs.shape != (pair_count(self.n),):
            raise ValueError("pair_probs inconsistent with node count")
        if np.any(probs < 0.0) or np.any(probs > 1.0):
            raise ValueError("edge probabilities must lie in [0, 1]")
        probs.setflags(write=False)
        object.__setattr__(self, "pair_probs", probs)
        if self.feature_block is not None:
            block = np.asarray(self.feature_block, dtype=float)
            if block.ndim != 2 or block.shape[0] != self.n:
                raise ValueError("feature block must have shape (n, d_f)")
            object.__setattr__(self, "feature_block", block)

    @property
    def component_count(self) -> int:
        extra = self.feature_block.size if self.feature_block is not None else 0
        return self.pair_probs.shape[0] + extra

    def edge_prob_matrix(self) -> np.ndarray:
        """Dense symmetric matrix with zero diagonal."""
        mat = np.zeros((self.n, self.n), dtype=float)
        iu, ju = np.triu_indices(self.n, k=1)
        mat[iu, ju] = self.pair_probs
        mat[ju, iu] = self.pair_probs
        return mat


@dataclass(frozen=True)
class DeviationReport:
    """Squared gap between two target fields, with the norms used downstream.

    ``sq_frobenius`` sums over unordered pairs once (plus feature components
    when both fields carry them); ``uncond_norm_sq`` follows the same
    convention.  ``relative_error`` is the per-component MSE over the
    unconditional field's squared norm, so it decays two orders faster than
    the per-component MSE itself on growing graphs.
    """

    sq_frobenius: float
    per_edge_mse: float
    uncond_norm_sq: float
    relative_error: float


def edge_posterior_conditional(observed, beta: float, p0: float):
    """P(clean edge present | observed bit, flip rate beta, prior density p0).

    Works elementwise on boolean arrays.  Degenerate 0/0 cases (p0 in {0,1}
    with an extreme beta) fall back to the prior p0.
    """
    if not (0.0 <= beta <= 1.0):
        raise ValueError("beta must be in [0, 1]")
    if not (0.0 <= p0 <= 1.0):
        raise ValueError("p0 must be in [0, 1]")
    num1 = (1.0 - beta) * p0
    den1 = (1.0 - beta) * p0 + beta * (1.0 - p0)
    num0 = beta * p0
    den0 = beta * p0 + (1.0 - beta) * (1.0 - p0)
    p_if_one = num1 / den1 if den1 > 0.0 else p0
    p_if_zero = num0 / den0 if den0 > 0.0 else p0
    observed = np.asarray(observed)
    if observed.shape == ():
        return p_if_one if bool(observed) else p_if_zero
    return np.where(observed, p_if_one, p_if_zero)


def conditional_target(noisy: NoisyGraph, beta: float, p0: float) -> TargetField:
    """Per-pair Bayes rule applied with the true flip rate."""
    return TargetField(n=noisy.n, pair_probs=edge_posterior_conditional(noisy.pairs, beta, p0))


def unconditional_target(
    noisy: NoisyGraph,
    p0: float,
    prior: tuple[float, float] = (1.0, 1.0),
    mode: str = "plugin",
    grid_size: int = 20001,
) -> TargetField:
    """Target with the flip rate inferred from the observed flip count.

    ``plugin`` evaluates the conditional rule at the posterior mean
    (flips + a0) / (m + a0 + b0).  ``mixture`` averages the conditional rule
    over the full Beta posterior by quadrature; it bounds the plug-in error
    in the oracle suite.
    """
    post = beta_posterior(noisy.flip_count, noisy.source_m, *prior)
    if mode == "plugin":
        return conditional_target(noisy, post.mean, p0)
    if mode != "mixture":
        raise ValueError("mode must be 'plugin' or 'mixture'")
    beta_grid = np.linspace(0.0, 1.0, grid_size)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_pdf = (post.a - 1.0) * np.log(beta_grid) + (post.b - 1.0) * np.log1p(-beta_grid)
    log_pdf[np.isnan(log_pdf)] = 0.0
    w = np.exp(log_pdf - log_pdf[np.isfinite(log_pdf)].max())
    z = np.trapezoid(w, beta_grid)
    if not (z > 0.0 and math.isfinite(z)):
        raise ArithmeticError("posterior weights are not normalizable on the grid")
    num1 = (1.0 - beta_grid) * p0
    den1 = num1 + beta_grid * (1.0 - p0)
    num0 = beta_grid * p0
    den0 = num0 + (1.0 - beta_grid) * (1.0 - p0)
    with np.errstate(invalid="ignore", divide="ignore"):
        c1 = np.where(den1 > 0.0, num1 / den1, p0)
        c0 = np.where(den0 > 0.0, num0 / den0, p0)
    mix1 = float(np.trapezoid(c1 * w, beta_grid) / z)
    mix0 = float(np.trapezoid(c0 * w, beta_grid) / z)
    probs = np.where(noisy.pairs, np.clip(mix1, 0.0, 1.0), np.clip(mix0, 0.0, 1.0))
    return TargetField(n=noisy.n, pair_probs=probs)


def target_deviation(cond: TargetField, uncond: TargetField) -> DeviationReport:
    """Squared Frobenius gap over unordered pairs (and feature components
    when both fields carry a block), never double-counted."""
    if cond.n != uncond.n or cond.pair_probs.shape != uncond.pair_probs.shape:
        raise ValueError("target fields have mismatched shapes")
    has_features = cond.feature_block is not None and uncond.feature_block is not None
    if has_features and cond.feature_block.shape != uncond.feature_block.shape:
        raise ValueError("feature blocks have mismatched shapes")

    diff = cond.pair_probs - uncond.pair_probs
    sq = float(diff @ diff)
    norm = float(uncond.pair_probs @ uncond.pair_probs)
    components = cond.pair_probs.shape[0]
    if has_features:
        fd = (cond.feature_block - uncond.feature_block).ravel()
        fu = uncond.feature_block.ravel()
        sq += float(fd @ fd)
        norm += float(fu @ fu)
        components += fd.shape[0]

    per_component = sq / components
    if norm > 0.0:
        relative = per_component / norm
    else:
        relative = 0.0 if sq == 0.0 else math.inf
    return DeviationReport(
        sq_frobenius=sq,
        per_edge_mse=per_component,
        uncond_norm_sq=norm,
        relative_error=relative,
    )


def feature_target(noisy_features: np.ndarray, tau: float) -> np.ndarray:
    """Posterior mean of unit-normal clean features under N(0, tau) noise."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    return np.asarray(noisy_features, dtype=float) / (1.0 + tau)


def multinomial_posterior(observed_k: int, t: float, prior_p, base_pi) -> np.ndarray:
    """Normalized posterior over clean categories for the keep-or-resample channel.

    P(clean=j | obs=k) = ((1-t)*1[j=k] + t*pi_k) * p_j / ((1-t)*p_k + t*pi_k).
    If the observation has zero probability under every clean category the
    prior is returned unchanged.
    """
    prior_p = np.asarray(prior_p, dtype=float)
    base_pi = np.asarray(base_pi, dtype=float)
    if prior_p.shape != base_pi.shape or prior_p.ndim != 1:
        raise ValueError("prior_p and base_pi must be matching 1-d simplices")
    for name, v in (("prior_p", prior_p), ("base_pi", base_pi)):
        if np.any(v < 0) or abs(v.sum() - 1.0) > 1e-12:
            raise ValueError(f"{name} must be a probability vector summing to 1")
    if not (0.0 <= t <= 1.0):
        raise ValueError("t must be in [0, 1]")
    k = prior_p.shape[0]
    if not (0 <= observed_k < k):
        raise ValueError("observed_k out of range")
    like = np.full(k, t * base_pi[observed_k])
    like[observed_k] += 1.0 - t
    unnorm = like * prior_p
    z = unnorm.sum()
    if z <= 0.0:
        return prior_p.copy()
    return unnorm / z


def beta_noise_posterior_mean(
    y_t: float, t: float, a0: float, b0: float, alpha_u: float, beta_u: float
) -> float:
    """Posterior-mean formula for the Beta blending channel, evaluated verbatim:
    ((1-t)*y*a0 + t*alpha_u) / ((1-t)*(a0+b0) + t*(alpha_u+beta_u))."""
    for name, v in (("a0", a0), ("b0", b0), ("alpha_u", alpha_u), ("beta_u", beta_u)):
        if v <= 0:
            raise ValueError(f"{name} must be positive")
    if not (0.0 <= t <= 1.0):
        raise ValueError("t must be in [0, 1]")
    return ((1.0 - t) * y_t * a0 + t * alpha_u) / ((1.0 - t) * (a0 + b0) + t * (alpha_u + beta_u))


def lipschitz_probe(target_fn, t_grid, inputs) -> float:
    """Max finite-difference slope of a channel target over a noise-level grid.

    ``target_fn(x, t)`` may return a scalar or an array; the slope uses the
    max-abs component change between adjacent grid points.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 10:
        raise ValueError("t_grid needs at least 10 points")
    if np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    max_slope = 0.0
    for x in inputs:
        values = [np.asarray(target_fn(x, tt), dtype=float) for tt in t]
        for a, b, ta, tb in zip(values[:-1], values[1:], t[:-1], t[1:]):
            slope = float(np.max(np.abs(b - a))) / (tb - ta)
            max_slope = max(max_slope, slope)
    return max_slope
