"""Render sweep results to PNG files next to the CSV output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import EXPERIMENT_METRICS, SweepResult, confidence_interval

__all__ = ["render_sweep_figure"]

_FIG_SIZE = (6.0, 4.2)


def _cell_means(rows, metric, x_of):
    by_x: dict[float, list[float]] = {}
    for row in rows:
        if row.metric == metric:
            by_x.setdefault(x_of(row), []).append(row.value)
    xs = sorted(by_x)
    return np.array(xs), np.array([np.mean(by_x[x]) for x in xs])


def _plot_scaling(ax, result: SweepResult):
    metric_map = EXPERIMENT_METRICS[result.config.experiment]
    fitted = {f.metric: f for f in result.fits}
    x_label = None
    for metric, x_var in metric_map.items():
        if x_var is None:
            continue
        x_label = x_var
        t_values = sorted({r.t for r in result.rows if r.metric == metric}, key=lambda t: (t is None, t))
        for t_steps in t_values:
            rows = [r for r in result.rows if r.t == t_steps]
            xs, ys = _cell_means(rows, metric, lambda r: {"M": r.m, "D": r.d, "n": r.n}[x_var])
            if xs.size == 0 or np.any(ys <= 0):
                continue
            label = metric if t_steps is None else f"{metric} (T={t_steps})"
            ax.loglog(xs, ys, "o", ms=4, label=label)
            key = metric if t_steps is None else f"{metric}[T={t_steps}]"
            fit = fitted.get(key)
            if fit is not None:
                line = np.exp(fit.fit.intercept) * xs ** fit.fit.slope
                ax.loglog(xs, line, "--", lw=1, color=ax.lines[-1].get_color())
    ax.set_xlabel(x_label or "size")
    ax.set_ylabel("metric value")
    ax.legend(fontsize=7)


def _plot_gamma(ax, result: SweepResult):
    gammas = list(result.config.gammas)
    means, halves = [], []
    for gamma in gammas:
        vals = [r.value for r in result.rows if r.metric == "total_error" and r.gamma == gamma]
        mean, half = confidence_interval(vals)
        means.append(mean)
        halves.append(half)
    ax.errorbar(gammas, means, yerr=halves, fmt="o-", capsize=3)
    ax.set_xlabel("coupling gamma")
    ax.set_ylabel("total reconstruction error")
    rho = result.extras.get("spearman_rho")
    if rho is not None:
        ax.set_title(f"gamma_sweep (spearman rho = {rho:.3f})", fontsize=10)


def render_sweep_figure(result: SweepResult, path) -> Path:
    """Write one PNG summarizing the sweep; returns the path written."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=_FIG_SIZE, dpi=150)
    ax.set_title(result.config.experiment, fontsize=10)
    if result.config.experiment == "gamma_sweep":
        _plot_gamma(ax, result)
    else:
        _plot_scaling(ax, result)
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
