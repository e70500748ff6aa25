"""Multi-step error accumulation and the geometric propagation bound.

A trajectory replays a noise schedule and records, at every step, the
squared gap between the target computed with the true noise level and the
target computed with the level inferred from the corrupted state.  The
default mode corrupts the clean graph afresh to each step's cumulative
level; ``chained`` evolves a single Markov chain instead, which couples
the per-step gaps through the shared state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import as_generator
from .graphs import Graph
from .noise import (
    CoupledParams,
    NoiseSchedule,
    NoisyGraph,
    bernoulli_flip,
    compose_flip_prob,
    coupled_corrupt,
)
from .posterior import beta_posterior, estimate_tau_x
from .targets import TargetField, conditional_target, feature_target, target_deviation

__all__ = [
    "BoundSpec",
    "TrajectoryReport",
    "geometric_bound",
    "mdep_trajectory",
    "jmep_trajectory",
    "coupled_reconstruction",
]


@dataclass(frozen=True)
class BoundSpec:
    """Inputs of the geometric accumulation bound (L^T - 1)/(L - 1) * delta_max."""

    l_max: float
    steps: int
    delta_max: float

    def __post_init__(self):
        if not (1.0 <= self.l_max < 1.2):
            raise ValueError("l_max must be 1 + eta with eta in [0, 0.2)")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.delta_max < 0:
            raise ValueError("delta_max must be nonnegative")


def geometric_bound(spec: BoundSpec) -> float:
    """Geometric-series bound on accumulated error; T * delta_max at l_max = 1."""
    if spec.l_max == 1.0:
        return spec.steps * spec.delta_max
    return (spec.l_max**spec.steps - 1.0) / (spec.l_max - 1.0) * spec.delta_max


@dataclass(frozen=True)
class TrajectoryReport:
    """Per-step squared target gaps and their aggregates.

    ``cumulative`` sums the raw per-step squared gaps; ``cumulative_per_edge``
    divides by the component count (pairs, plus feature components for joint
    runs).  ``bound_value`` evaluates the geometric bound at the measured
    delta_max, so ``cumulative <= bound_value`` whenever l_max >= 1.
    """

    per_step_delta: np.ndarray
    cumulative: float
    cumulative_per_edge: float
    delta_max: float
    bound_value: float
    component_count: int
    l_max: float

    def __post_init__(self):
        deltas = np.asarray(self.per_step_delta, dtype=float)
        if np.any(deltas < 0):
            raise ValueError("per-step gaps cannot be negative")
        deltas.setflags(write=False)
        object.__setattr__(self, "per_step_delta", deltas)


def _finish_report(deltas: list[float], components: int, l_max: float) -> TrajectoryReport:
    arr = np.asarray(deltas, dtype=float)
    cumulative = float(arr.sum())
    delta_max = float(arr.max())
    return TrajectoryReport(
        per_step_delta=arr,
        cumulative=cumulative,
        cumulative_per_edge=cumulative / components,
        delta_max=delta_max,
        bound_value=geometric_bound(BoundSpec(l_max=l_max, steps=arr.size, delta_max=delta_max)),
        component_count=components,
        l_max=l_max,
    )


def mdep_trajectory(
    g: Graph,
    schedule: NoiseSchedule,
    prior: tuple[float, float] = (1.0, 1.0),
    seed=None,
    l_max: float = 1.0,
    mode: str = "fresh",
    force_exact_rate: bool = False,
) -> TrajectoryReport:
    """Structure-only trajectory of conditional-versus-inferred target gaps.

    At step i the state carries cumulative flip probability p_i (composed
    from the schedule).  The conditional target uses the true p_i; the
    unconditional one re-estimates it from the realized flip count.
    ``force_exact_rate`` short-circuits the estimate to the true rate, which
    zeroes every gap and is useful as a self-test hook.
    """
    if mode not in ("fresh", "chained"):
        raise ValueError("mode must be 'fresh' or 'chained'")
    rng = as_generator(seed)
    p0 = g.density_p0
    m = g.num_pairs
    state = g.pairs
    deltas: list[float] = []
    for i in range(1, schedule.steps + 1):
        p_bar = compose_flip_prob(schedule, i)
        if mode == "fresh":
            noisy = bernoulli_flip(g, p_bar, rng)
        else:
            state = state ^ (rng.random(m) < schedule.betas[i - 1])
            noisy = NoisyGraph(
                n=g.n,
                pairs=state,
                flip_count=int(np.count_nonzero(state ^ g.pairs)),
                source_m=m,
            )
        cond = conditional_target(noisy, p_bar, p0)
        beta_hat = p_bar if force_exact_rate else beta_posterior(noisy.flip_count, m, *prior).mean
        uncond = conditional_target(noisy, beta_hat, p0)
        deltas.append(target_deviation(cond, uncond).sq_frobenius)
    return _finish_report(deltas, m, l_max)


def jmep_trajectory(
    g: Graph,
    features_x0: np.ndarray,
    schedule: NoiseSchedule,
    tau_x: float,
    prior: tuple[float, float] = (1.0, 1.0),
    seed=None,
    l_max: float = 1.0,
    force_exact_rate: bool = False,
) -> TrajectoryReport:
    """Joint structure-feature trajectory.

    Structure follows the schedule's cumulative flip level; feature noise
    accumulates additively, tau_i = i * tau_x.  Per step both blocks are
    corrupted afresh, and the gap sums the squared edge-target difference
    (true rate vs estimated rate) with the squared feature-target difference
    (true tau_i vs tau estimated from the noisy features).  Gaps are
    normalized by the joint component count M + n*d_f.  With zero feature
    columns this reduces exactly to ``mdep_trajectory``.
    """
    if tau_x < 0:
        raise ValueError("tau_x must be nonnegative")
    features_x0 = np.asarray(features_x0, dtype=float)
    if features_x0.ndim != 2 or features_x0.shape[0] != g.n:
        raise ValueError("features must have shape (n, d_f)")
    d_f = features_x0.shape[1]
    rng = as_generator(seed)
    p0 = g.density_p0
    m = g.num_pairs
    components = m + g.n * d_f
    deltas: list[float] = []
    for i in range(1, schedule.steps + 1):
        p_bar = compose_flip_prob(schedule, i)
        noisy = bernoulli_flip(g, p_bar, rng)
        tau_bar = tau_x * i
        if d_f:
            noisy_features = features_x0 + math.sqrt(tau_bar) * rng.standard_normal(
                features_x0.shape
            )
        else:
            noisy_features = features_x0

        beta_hat = p_bar if force_exact_rate else beta_posterior(noisy.flip_count, m, *prior).mean
        cond_probs = conditional_target(noisy, p_bar, p0)
        uncond_probs = conditional_target(noisy, beta_hat, p0)
        if d_f:
            tau_hat = tau_bar if force_exact_rate else estimate_tau_x(noisy_features)
            cond = TargetField(
                n=g.n,
                pair_probs=cond_probs.pair_probs,
                feature_block=feature_target(noisy_features, tau_bar),
            )
            uncond = TargetField(
                n=g.n,
                pair_probs=uncond_probs.pair_probs,
                feature_block=feature_target(noisy_features, tau_hat),
            )
        else:
            cond, uncond = cond_probs, uncond_probs
        deltas.append(target_deviation(cond, uncond).sq_frobenius)
    return _finish_report(deltas, components, l_max)


def _log_normal_pdf(x: np.ndarray, sigma: float) -> np.ndarray:
    return -0.5 * (x / sigma) ** 2


def coupled_reconstruction(
    g: Graph,
    features_x0: np.ndarray,
    params: CoupledParams,
    schedule: NoiseSchedule,
    seed=None,
    p0_override: float | None = None,
) -> tuple[float, float, float]:
    """One-shot corruption at terminal noise, then noise-blind reconstruction.

    Structure: Bernoulli flips at the schedule's terminal composed level,
    then the coupled Gaussian perturbation.  Reconstruction thresholds the
    per-pair posterior at 0.5, with the Gaussian scale estimated from the
    observed pair values (excess variance over a Bernoulli layer of the
    observed mean); features are shrunk by the estimated noise variance.
    Returns (structural L1 error over unordered pairs, feature Frobenius
    error, their sum).
    """
    rng = as_generator(seed)
    beta_term = compose_flip_prob(schedule, schedule.steps)
    flipped = bernoulli_flip(g, beta_term, rng)
    flipped_graph = Graph(n=g.n, pairs=flipped.pairs)
    state = coupled_corrupt(flipped_graph, features_x0, params, rng)

    observed = state.structure_pairs()
    p0 = g.density_p0 if p0_override is None else p0_override

    q_hat = float(np.clip(observed.mean(), 1e-9, 1.0 - 1e-9))
    sigma_sq_hat = max(1e-12, float(observed.var()) - q_hat * (1.0 - q_hat))
    sigma_hat = math.sqrt(sigma_sq_hat)

    log_phi_1 = _log_normal_pdf(observed - 1.0, sigma_hat)
    log_phi_0 = _log_normal_pdf(observed, sigma_hat)
    shift = np.maximum(log_phi_1, log_phi_0)
    phi_1 = np.exp(log_phi_1 - shift)
    phi_0 = np.exp(log_phi_0 - shift)
    like_1 = (1.0 - beta_term) * phi_1 + beta_term * phi_0
    like_0 = (1.0 - beta_term) * phi_0 + beta_term * phi_1
    post_1 = p0 * like_1 / (p0 * like_1 + (1.0 - p0) * like_0)
    reconstructed = post_1 > 0.5
    err_struct = float(np.count_nonzero(reconstructed != g.pairs))

    tau_hat = estimate_tau_x(state.noisy_features)
    features_hat = feature_target(state.noisy_features, tau_hat)
    err_feat = float(np.linalg.norm(features_hat - np.asarray(features_x0, dtype=float)))
    return err_struct, err_feat, err_struct + err_feat
