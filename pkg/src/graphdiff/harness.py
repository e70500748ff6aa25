"""Experiment orchestration: parameter sweeps, per-seed statistics, log-log
regression with confidence intervals, and CSV/JSON export.

Cells (one graph size x one trial) are seeded independently from
(base_seed, experiment, size index, trial), so results are byte-identical
for any thread count and any execution order.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ._rng import cell_seed
from .graphs import (
    Graph,
    PowerLawSpec,
    SbmSpec,
    degree_moments,
    generate_er,
    generate_powerlaw,
    generate_sbm,
    pair_count,
)
from .noise import (
    CoupledParams,
    bernoulli_flip,
    bernoulli_flip_feature_hybrid,
    linear_schedule,
)
from .posterior import beta_posterior, estimate_tau_x, scale_free_exponent
from .propagation import coupled_reconstruction, jmep_trajectory, mdep_trajectory
from .targets import (
    TargetField,
    conditional_target,
    feature_target,
    target_deviation,
    unconditional_target,
)

__all__ = [
    "EXPERIMENTS",
    "DegenerateFitError",
    "RegressionFit",
    "FitSummary",
    "Row",
    "SweepConfig",
    "SweepResult",
    "default_config",
    "loglog_fit",
    "confidence_interval",
    "spearman_rho",
    "run_sweep",
    "export_csv",
    "read_rows",
    "fits_from_rows",
]

EXPERIMENTS = (
    "efpc",
    "etdb",
    "mdep",
    "jpc",
    "jtdb",
    "jmep",
    "gamma_sweep",
    "scalefree_probe",
)

_EXPERIMENT_IDS = {name: i for i, name in enumerate(EXPERIMENTS)}

# metric -> regression x-variable ("M", "D", "n"); None entries are exported
# but never fitted on a log-log axis.
EXPERIMENT_METRICS: dict[str, dict[str, str | None]] = {
    "efpc": {"posterior_var": "M", "m_times_var": None, "posterior_mean": None},
    "etdb": {"per_edge_mse": "M", "uncond_norm_sq": "M", "relative_error": "M"},
    "mdep": {"cumulative_per_edge": "M"},
    "jpc": {"posterior_var": "D"},
    "jtdb": {"per_component_mse": "D", "uncond_norm_sq": "D"},
    "jmep": {"cumulative_per_component": "D"},
    "gamma_sweep": {"total_error": None, "struct_error_l1": None, "feat_error_frob": None},
    "scalefree_probe": {"mean_degree": None, "second_moment": "n", "k_max": "n"},
}

_FEATURE_EXPERIMENTS = {"jpc", "jtdb", "jmep", "gamma_sweep"}

CSV_HEADER = ("experiment", "family", "n", "M", "D", "T", "gamma", "beta", "seed", "metric", "value")

# two-sided 95% Student-t quantiles, df 1..30; the normal value is used beyond
_T_TABLE_95 = (
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
    2.201, 2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
    2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
)


class DegenerateFitError(RuntimeError):
    """Raised when a regression has no spread on the x axis."""


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r_squared: float
    slope_ci_halfwidth: float = 0.0


@dataclass(frozen=True)
class FitSummary:
    experiment: str
    metric: str
    fit: RegressionFit
    n_cells: int


@dataclass(frozen=True)
class Row:
    experiment: str
    family: str
    n: int
    m: int
    d: int
    t: int | None
    gamma: float | None
    beta: float
    seed: int
    metric: str
    value: float


def loglog_fit(points) -> RegressionFit:
    """OLS of ln y on ln x; slope, intercept, and R^2 in the usual sense."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ValueError("log-log fit requires strictly positive values")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    dx = lx - lx.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DegenerateFitError("all x values coincide")
    slope = float(dx @ (ly - ly.mean())) / sxx
    intercept = float(ly.mean() - slope * lx.mean())
    residuals = ly - (intercept + slope * lx)
    ss_res = float(residuals @ residuals)
    dy = ly - ly.mean()
    ss_tot = float(dy @ dy)
    r2 = 1.0 if ss_tot == 0.0 and ss_res == 0.0 else 1.0 - ss_res / ss_tot
    return RegressionFit(slope=slope, intercept=intercept, r_squared=r2)


def confidence_interval(samples, level: float = 0.95) -> tuple[float, float]:
    """Mean and t-based 95% halfwidth; quantiles come from an embedded table."""
    if level != 0.95:
        raise ValueError("only the 0.95 level is supported")
    arr = np.asarray(list(samples), dtype=float)
    if arr.size < 2:
        raise ValueError("need at least 2 samples")
    df = arr.size - 1
    t = _T_TABLE_95[df - 1] if df <= 30 else 1.96
    halfwidth = t * float(arr.std(ddof=1)) / math.sqrt(arr.size)
    return float(arr.mean()), halfwidth


def spearman_rho(x, y) -> float:
    """Rank correlation (no tie correction; inputs are continuous here)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ValueError("need two equal-length vectors of size >= 2")

    def ranks(v):
        r = np.empty(v.size)
        r[np.argsort(v, kind="stable")] = np.arange(v.size)
        return r

    rx, ry = ranks(x), ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = math.sqrt(float(rx @ rx) * float(ry @ ry))
    return float(rx @ ry) / denom if denom else 0.0


@dataclass(frozen=True)
class SweepConfig:
    """Full description of one experiment sweep."""

    experiment: str
    sizes: tuple[int, ...]
    family: str = "sbm"
    trials: int = 5
    base_seed: int = 0
    beta: float = 0.2
    schedule_start: float | None = None  # default: constant at beta
    schedule_end: float | None = None
    step_counts: tuple[int, ...] = (1,)
    gammas: tuple[float, ...] = (0.7,)
    tau_x: float = 0.5
    d_f: int = 8
    sigma_a: float = 0.5
    sigma_x: float = math.sqrt(0.5)
    p_edge: float = 0.1
    communities: int = 3
    p_intra: float = 0.3
    p_inter: float = 0.05
    alpha: float = 2.5
    k_min: int = 2
    prior: tuple[float, float] = (1.0, 1.0)
    threads: int = 1
    out_path: str | None = None
    json_path: str | None = None
    plot: bool = False

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.family not in ("er", "sbm", "powerlaw"):
            raise ValueError("family must be one of er, sbm, powerlaw")
        if not self.sizes or any(n < 2 for n in self.sizes):
            raise ValueError("sizes must be a nonempty list of node counts >= 2")
        if list(self.sizes) != sorted(set(self.sizes)):
            raise ValueError("sizes must be strictly increasing")
        if self.trials < 2:
            raise ValueError("trials must be >= 2 (confidence intervals need 2 samples)")
        if not (0.0 <= self.beta <= 1.0):
            raise ValueError("beta must be in [0,1]")
        for v in (self.schedule_start, self.schedule_end):
            if v is not None and not (0.0 <= v <= 1.0):
                raise ValueError("schedule endpoints must be in [0,1]")
        if not self.step_counts or any(t < 1 for t in self.step_counts):
            raise ValueError("step counts must be >= 1")
        if list(self.step_counts) != sorted(set(self.step_counts)):
            raise ValueError("step counts must be strictly increasing")
        if any(not (0.0 <= v <= 0.99) for v in self.gammas):
            raise ValueError("gamma values must be in [0, 0.99]")
        if self.tau_x < 0:
            raise ValueError("tau_x must be nonnegative")
        if self.d_f < 0:
            raise ValueError("dfeat must be nonnegative")
        if self.experiment in _FEATURE_EXPERIMENTS and self.d_f < 1:
            raise ValueError(f"{self.experiment} requires dfeat >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    @property
    def effective_schedule(self):
        start = self.beta if self.schedule_start is None else self.schedule_start
        end = self.beta if self.schedule_end is None else self.schedule_end
        return start, end

    def d_value(self, n: int) -> int:
        if self.experiment in _FEATURE_EXPERIMENTS:
            return pair_count(n) + n * self.d_f
        return pair_count(n)


_DEFAULTS: dict[str, dict] = {
    "efpc": dict(sizes=(50, 100, 150, 200, 250, 300), family="sbm", beta=0.2, trials=10),
    "etdb": dict(
        sizes=(200, 283, 400, 566, 800, 1131, 1600, 2263, 3200),
        family="sbm",
        beta=0.2,
        trials=50,
    ),
    "mdep": dict(
        sizes=(15, 45, 142, 448, 1415, 3163),
        family="sbm",
        beta=0.1,
        step_counts=(4, 8, 16, 32, 64),
        trials=20,
    ),
    "jpc": dict(
        sizes=(45, 80, 141, 251, 446, 794, 1412, 2512, 4466),
        family="er",
        beta=0.2,
        trials=20,
    ),
    "jtdb": dict(
        sizes=(45, 80, 141, 251, 446, 794, 1412, 2512, 4466),
        family="er",
        beta=0.2,
        trials=20,
    ),
    "jmep": dict(
        sizes=(45, 80, 141, 251, 446, 794, 1412, 2512, 4466),
        family="er",
        beta=0.1,
        step_counts=(4,),
        trials=10,
    ),
    "gamma_sweep": dict(
        sizes=(400,),
        family="sbm",
        beta=0.0,
        gammas=(0.0, 0.2, 0.4, 0.6, 0.8, 0.99),
        trials=10,
    ),
    "scalefree_probe": dict(
        sizes=(500, 1000, 2000, 4000, 8000),
        family="powerlaw",
        trials=5,
    ),
}


def default_config(experiment: str) -> SweepConfig:
    """Baseline configuration for a named experiment."""
    if experiment not in _DEFAULTS:
        raise ValueError(f"unknown experiment {experiment!r}")
    return SweepConfig(experiment=experiment, **_DEFAULTS[experiment])


@dataclass
class SweepResult:
    config: SweepConfig
    rows: list[Row]
    fits: list[FitSummary]
    extras: dict = field(default_factory=dict)


def _make_graph(config: SweepConfig, n: int, rng) -> Graph:
    if config.family == "er":
        return generate_er(n, config.p_edge, rng)
    if config.family == "sbm":
        return generate_sbm(
            SbmSpec(n=n, k=config.communities, p_intra=config.p_intra, p_inter=config.p_inter),
            rng,
        )
    return generate_powerlaw(PowerLawSpec(n=n, alpha=config.alpha, k_min=config.k_min), rng)


def _efpc_cell(config: SweepConfig, n: int, rng) -> list[tuple[str, float, int | None]]:
    g = _make_graph(config, n, rng)
    noisy = bernoulli_flip(g, config.beta, rng)
    post = beta_posterior(noisy.flip_count, g.num_pairs, *config.prior)
    return [
        ("posterior_var", post.variance, None),
        ("m_times_var", g.num_pairs * post.variance, None),
        ("posterior_mean", post.mean, None),
    ]


def _etdb_cell(config: SweepConfig, n: int, rng) -> list[tuple[str, float, int | None]]:
    g = _make_graph(config, n, rng)
    noisy = bernoulli_flip(g, config.beta, rng)
    cond = conditional_target(noisy, config.beta, g.density_p0)
    uncond = unconditional_target(noisy, g.density_p0, config.prior)
    dev = target_deviation(cond, uncond)
    return [
        ("per_edge_mse", dev.per_edge_mse, None),
        ("uncond_norm_sq", dev.uncond_norm_sq, None),
        ("relative_error", dev.relative_error, None),
    ]


def _mdep_cell(config: SweepConfig, n: int, rng) -> list[tuple[str, float, int | None]]:
    g = _make_graph(config, n, rng)
    start, end = config.effective_schedule
    out = []
    if start == end:
        # constant schedule: every requested horizon is a prefix of the longest run
        schedule = linear_schedule(start, end, max(config.step_counts))
        traj = mdep_trajectory(g, schedule, prior=config.prior, seed=rng)
        for t_steps in config.step_counts:
            cum = float(traj.per_step_delta[:t_steps].sum())
            out.append(("cumulative_per_edge", cum / g.num_pairs, t_steps))
    else:
        for t_steps in config.step_counts:
            schedule = linear_schedule(start, end, t_steps)
            traj = mdep_trajectory(g, schedule, prior=config.prior, seed=rng)
            out.append(("cumulative_per_edge", traj.cumulative_per_edge, t_steps))
    return out


def _jpc_cell(config: SweepConfig, n: int, rng) -> list[tuple[str, float, int | None]]:
    g = _make_graph(config, n, rng)
    x0 = rng.standard_normal((n, config.d_f))
    noisy, _ = bernoulli_flip_feature_hybrid(g, config.beta, x0, config.tau_x, rng)
    post = beta_posterior(noisy.flip_count, g.num_pairs, *config.prior)
    return [("posterior_var", post.variance, None)]


def _jtdb_cell(config: SweepConfig, n: int, rng) -> list[tuple[str, float, int | None]]:
    g = _make_graph(config, n, rng)
    x0 = rng.standard_normal((n, config.d_f))
    noisy, noisy_x = bernoulli_flip_feature_hybrid(g, config.beta, x0, config.tau_x, rng)
    p0 = g.density_p0
    cond_edges = conditional_target(noisy, config.beta, p0)
    uncond_edges = unconditional_target(noisy, p0, config.prior)
    tau_hat = estimate_tau_x(noisy_x)
    cond = TargetField(
        n=n, pair_probs=cond_edges.pair_probs, feature_block=feature_target(noisy_x, config.tau_x)
    )
    uncond = TargetField(
        n=n, pair_probs=uncond_edges.pair_probs, feature_block=feature_target(noisy_x, tau_hat)
    )
    dev = target_deviation(cond, uncond)
    edge_norm = float(uncond_edges.pair_probs @ uncond_edges.pair_probs)
    return [
        ("per_component_mse", dev.per_edge_mse, None),
        ("uncond_norm_sq", edge_norm, None),
    ]


def _jmep_cell(config: SweepConfig, n: int, rng) -> list[tuple[str, float, int | None]]:
    g = _make_graph(config, n, rng)
    x0 = rng.standard_normal((n, config.d_f))
    start, end = config.effective_schedule
    d = g.num_pairs + n * config.d_f
    out = []
    if start == end:
        schedule = linear_schedule(start, end, max(config.step_counts))
        traj = jmep_trajectory(g, x0, schedule, config.tau_x, prior=config.prior, seed=rng)
        for t_steps in config.step_counts:
            cum = float(traj.per_step_delta[:t_steps].sum())
            out.append(("cumulative_per_component", cum / d, t_steps))
    else:
        for t_steps in config.step_counts:
            schedule = linear_schedule(start, end, t_steps)
            traj = jmep_trajectory(g, x0, schedule, config.tau_x, prior=config.prior, seed=rng)
            out.append(("cumulative_per_component", traj.cumulative_per_edge, t_steps))
    return out


def _scalefree_cell(config: SweepConfig, n: int, rng) -> list[tuple[str, float, int | None]]:
    g = _make_graph(config, n, rng)
    mean_deg, second, k_max = degree_moments(g)
    return [
        ("mean_degree", mean_deg, None),
        ("second_moment", second, None),
        ("k_max", float(k_max), None),
    ]


_CELL_RUNNERS = {
    "efpc": _efpc_cell,
    "etdb": _etdb_cell,
    "mdep": _mdep_cell,
    "jpc": _jpc_cell,
    "jtdb": _jtdb_cell,
    "jmep": _jmep_cell,
    "scalefree_probe": _scalefree_cell,
}


def _run_standard_cells(config: SweepConfig) -> list[Row]:
    runner = _CELL_RUNNERS[config.experiment]
    exp_id = _EXPERIMENT_IDS[config.experiment]

    def one_cell(task):
        size_idx, n, trial = task
        rng = np.random.default_rng(cell_seed(config.base_seed, exp_id, size_idx, trial))
        try:
            metrics = runner(config, n, rng)
        except Exception as exc:
            raise RuntimeError(
                f"cell failed (experiment={config.experiment}, n={n}, trial={trial}): {exc}"
            ) from exc
        m = pair_count(n)
        return [
            Row(
                experiment=config.experiment,
                family=config.family,
                n=n,
                m=m,
                d=config.d_value(n),
                t=t_steps,
                gamma=None,
                beta=config.beta,
                seed=trial,
                metric=name,
                value=float(value),
            )
            for name, value, t_steps in metrics
        ]

    tasks = [
        (size_idx, n, trial)
        for size_idx, n in enumerate(config.sizes)
        for trial in range(config.trials)
    ]
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            chunks = list(pool.map(one_cell, tasks))
    else:
        chunks = [one_cell(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def _run_gamma_cells(config: SweepConfig) -> list[Row]:
    """Gamma sweep: all gamma values of one trial share the trial's random
    draws (the channel's latents do not depend on gamma), so curves differ
    by coupling strength only."""
    exp_id = _EXPERIMENT_IDS[config.experiment]
    n = config.sizes[-1]
    start, end = config.effective_schedule
    schedule = linear_schedule(start, end, max(config.step_counts))

    def one_trial(trial: int) -> list[Row]:
        rows = []
        ss = cell_seed(config.base_seed, exp_id, 0, trial)
        for gamma in config.gammas:
            rng = np.random.default_rng(ss)  # identical stream for every gamma
            try:
                g = _make_graph(config, n, rng)
                x0 = rng.standard_normal((n, config.d_f))
                params = CoupledParams(
                    sigma_a=config.sigma_a, sigma_x=config.sigma_x, gamma=gamma, d_f=config.d_f
                )
                struct_err, feat_err, total = coupled_reconstruction(
                    g, x0, params, schedule, seed=rng
                )
            except Exception as exc:
                raise RuntimeError(
                    f"cell failed (experiment=gamma_sweep, gamma={gamma}, trial={trial}): {exc}"
                ) from exc
            for name, value in (
                ("total_error", total),
                ("struct_error_l1", struct_err),
                ("feat_error_frob", feat_err),
            ):
                rows.append(
                    Row(
                        experiment=config.experiment,
                        family=config.family,
                        n=n,
                        m=pair_count(n),
                        d=config.d_value(n),
                        t=None,
                        gamma=gamma,
                        beta=config.beta,
                        seed=trial,
                        metric=name,
                        value=float(value),
                    )
                )
        return rows

    trials = range(config.trials)
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            chunks = list(pool.map(one_trial, trials))
    else:
        chunks = [one_trial(t) for t in trials]
    return [row for chunk in chunks for row in chunk]


def _row_sort_key(row: Row):
    return (
        row.n,
        row.seed,
        row.metric,
        -1 if row.t is None else row.t,
        -1.0 if row.gamma is None else row.gamma,
    )


def _x_of(row: Row, x_var: str) -> float:
    return {"M": row.m, "D": row.d, "n": row.n}[x_var]


def fits_from_rows(rows: list[Row]) -> tuple[list[FitSummary], dict]:
    """Log-log fits on per-size cell means, with 95% CIs over per-seed slopes.

    Operates on the sorted row list so that a re-import of the exported CSV
    reproduces every fit bit for bit.
    """
    if not rows:
        return [], {}
    experiment = rows[0].experiment
    metric_map = EXPERIMENT_METRICS[experiment]
    skipped = []
    fits: list[FitSummary] = []

    groups: dict[tuple[str, int | None], list[Row]] = {}
    for row in rows:
        if row.metric not in metric_map:
            raise ValueError(f"unknown metric {row.metric!r} for experiment {experiment}")
        groups.setdefault((row.metric, row.t), []).append(row)

    for (metric, t_steps), group in sorted(
        groups.items(), key=lambda kv: (kv[0][0], -1 if kv[0][1] is None else kv[0][1])
    ):
        x_var = metric_map[metric]
        if x_var is None:
            continue
        label = metric if t_steps is None else f"{metric}[T={t_steps}]"
        by_size: dict[float, list[float]] = {}
        by_seed: dict[int, list[tuple[float, float]]] = {}
        for row in group:
            x = _x_of(row, x_var)
            by_size.setdefault(x, []).append(row.value)
            by_seed.setdefault(row.seed, []).append((x, row.value))
        points = [(x, float(np.mean(vals))) for x, vals in sorted(by_size.items())]
        try:
            fit = loglog_fit(points)
        except (DegenerateFitError, ValueError) as exc:
            skipped.append({"metric": label, "reason": str(exc)})
            continue
        slopes = []
        try:
            for seed in sorted(by_seed):
                slopes.append(loglog_fit(sorted(by_seed[seed])).slope)
            _, halfwidth = confidence_interval(slopes)
        except (DegenerateFitError, ValueError):
            halfwidth = 0.0
        fits.append(
            FitSummary(
                experiment=experiment,
                metric=label,
                fit=replace(fit, slope_ci_halfwidth=halfwidth),
                n_cells=len(group),
            )
        )
    extras = {"fit_skipped": skipped} if skipped else {}
    return fits, extras


def _experiment_extras(config: SweepConfig, rows: list[Row]) -> dict:
    extras: dict = {}
    if config.experiment == "efpc":
        largest = max(r.n for r in rows)
        mv = [r.value for r in rows if r.metric == "m_times_var" and r.n == largest]
        pm = [r.value for r in rows if r.metric == "posterior_mean" and r.n == largest]
        extras["m_times_var_at_largest"] = float(np.mean(mv))
        extras["posterior_mean_bias_at_largest"] = abs(float(np.mean(pm)) - config.beta)
    elif config.experiment == "mdep":
        # T-collapse: after dividing by T, curves for every horizon should
        # coincide; report the worst relative spread over the larger sizes.
        by_size_t: dict[tuple[int, int], list[float]] = {}
        for r in rows:
            if r.metric == "cumulative_per_edge":
                by_size_t.setdefault((r.m, r.t), []).append(r.value)
        spreads = {}
        for m in sorted({m for m, _ in by_size_t}):
            if m < 10**4:
                continue
            normalized = [
                float(np.mean(vals)) / t for (mm, t), vals in by_size_t.items() if mm == m
            ]
            if len(normalized) > 1:
                spreads[m] = (max(normalized) - min(normalized)) / float(np.mean(normalized))
        extras["collapse_relative_spread_by_m"] = spreads
        if spreads:
            extras["collapse_max_relative_spread"] = max(spreads.values())
    elif config.experiment == "gamma_sweep":
        means = {}
        for gamma in config.gammas:
            vals = [r.value for r in rows if r.metric == "total_error" and r.gamma == gamma]
            means[gamma] = float(np.mean(vals))
        ordered = [means[g] for g in config.gammas]
        extras["total_error_by_gamma"] = means
        extras["spearman_rho"] = spearman_rho(list(config.gammas), ordered)
        if ordered[0] > 0:
            extras["reduction_low_to_high"] = (ordered[0] - ordered[-1]) / ordered[0]
    elif config.experiment == "scalefree_probe":
        extras["predicted_variance_exponent"] = scale_free_exponent(config.alpha)
        if config.alpha < 3.0:
            extras["predicted_second_moment_exponent"] = (3.0 - config.alpha) / (config.alpha - 1.0)
    return extras


def run_sweep(config: SweepConfig) -> SweepResult:
    """Execute the configured experiment and aggregate rows, fits, and extras.

    Writes CSV/JSON/figure outputs when the corresponding paths are set.
    """
    if config.experiment == "gamma_sweep":
        rows = _run_gamma_cells(config)
    else:
        rows = _run_standard_cells(config)
    rows.sort(key=_row_sort_key)
    fits, fit_extras = fits_from_rows(rows)
    extras = {**fit_extras, **_experiment_extras(config, rows)}
    result = SweepResult(config=config, rows=rows, fits=fits, extras=extras)
    if config.out_path:
        export_csv(rows, config.out_path)
    if config.json_path:
        write_json_summary(result, config.json_path)
    if config.plot and config.out_path:
        from . import figures

        figures.render_sweep_figure(result, Path(config.out_path).with_suffix(".png"))
    return result


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def export_csv(rows, path) -> None:
    """Write rows as UTF-8 CSV with 17-significant-digit floats."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for row in rows:
                writer.writerow(
                    [
                        row.experiment,
                        row.family,
                        str(row.n),
                        str(row.m),
                        str(row.d),
                        "" if row.t is None else str(row.t),
                        "" if row.gamma is None else _fmt(row.gamma),
                        _fmt(row.beta),
                        str(row.seed),
                        row.metric,
                        _fmt(row.value),
                    ]
                )
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def read_rows(path) -> list[Row]:
    """Parse a CSV written by export_csv back into rows (exact float round-trip)."""
    rows: list[Row] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        for rec in reader:
            rows.append(
                Row(
                    experiment=rec[0],
                    family=rec[1],
                    n=int(rec[2]),
                    m=int(rec[3]),
                    d=int(rec[4]),
                    t=None if rec[5] == "" else int(rec[5]),
                    gamma=None if rec[6] == "" else float(rec[6]),
                    beta=float(rec[7]),
                    seed=int(rec[8]),
                    metric=rec[9],
                    value=float(rec[10]),
                )
            )
    return rows


def write_json_summary(result: SweepResult, path) -> None:
    payload = {
        "experiment": result.config.experiment,
        "fits": [
            {
                "experiment": f.experiment,
                "metric": f.metric,
                "slope": f.fit.slope,
                "ci": f.fit.slope_ci_halfwidth,
                "r2": f.fit.r_squared,
                "n_cells": f.n_cells,
            }
            for f in result.fits
        ],
        "extras": _jsonable(result.extras),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj
