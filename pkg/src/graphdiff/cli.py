"""Command-line interface.

One subcommand per experiment (efpc, etdb, mdep, jpc, jtdb, jmep, gamma,
scalefree) plus ``channels`` for schedule/channel diagnostics.  Option
precedence is defaults < config file < command-line flags; the environment
variable GRAPHDIFF_SEED overrides the seed when set.

Exit codes: 0 success, 2 parameter/usage error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .harness import DegenerateFitError, SweepConfig, default_config, run_sweep
from .noise import compose_flip_prob, linear_schedule, poisson_flip_prob

__all__ = ["main", "parse_and_dispatch", "load_config", "build_parser"]

_SUBCOMMANDS = {
    "efpc": "efpc",
    "etdb": "etdb",
    "mdep": "mdep",
    "jpc": "jpc",
    "jtdb": "jtdb",
    "jmep": "jmep",
    "gamma": "gamma_sweep",
    "scalefree": "scalefree_probe",
}

# config-file key -> (attribute, parser)
_CONFIG_KEYS = {
    "family": ("family", str),
    "nodes": ("sizes", lambda s: _parse_int_list(s, "nodes")),
    "beta": ("beta", float),
    "schedule_start": ("schedule_start", float),
    "schedule_end": ("schedule_end", float),
    "steps": ("step_counts", lambda s: _parse_int_list(s, "steps")),
    "gamma": ("gammas", lambda s: _parse_float_list(s, "gamma")),
    "tau_x": ("tau_x", float),
    "dfeat": ("d_f", int),
    "trials": ("trials", int),
    "seed": ("base_seed", int),
    "threads": ("threads", int),
    "out": ("out_path", str),
    "json_out": ("json_path", str),
    "p_edge": ("p_edge", float),
    "communities": ("communities", int),
    "p_intra": ("p_intra", float),
    "p_inter": ("p_inter", float),
    "alpha": ("alpha", float),
    "k_min": ("k_min", int),
    "sigma_a": ("sigma_a", float),
    "sigma_x": ("sigma_x", float),
    "plot": ("plot", lambda s: s.strip().lower() in ("1", "true", "yes")),
}


def _parse_int_list(text: str, name: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in str(text).split(",") if part.strip() != "")
    except ValueError as exc:
        raise ValueError(f"{name} must be a comma-separated list of integers") from exc


def _parse_float_list(text: str, name: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in str(text).split(",") if part.strip() != "")
    except ValueError as exc:
        raise ValueError(f"{name} must be a comma-separated list of numbers") from exc


def load_config(path) -> dict:
    """Parse a key=value config file into SweepConfig attribute overrides.

    Lines starting with '#' and blank lines are ignored.  Unknown keys and
    malformed lines raise ValueError naming the line.
    """
    overrides = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        attr, parser = _CONFIG_KEYS[key]
        try:
            overrides[attr] = parser(value.strip())
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return overrides


def _dump_config(config: SweepConfig, path) -> None:
    attr_to_key = {attr: key for key, (attr, _) in _CONFIG_KEYS.items()}
    with open(path, "w", encoding="utf-8") as fh:
        for attr, key in attr_to_key.items():
            value = getattr(config, attr)
            if value is None:
                continue
            if isinstance(value, tuple):
                value = ",".join(format(v, "g") if isinstance(v, float) else str(v) for v in value)
            elif isinstance(value, bool):
                value = "true" if value else "false"
            fh.write(f"{key}={value}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphdiff",
        description="Graph corruption channels, noise-rate posteriors, and scaling-law sweeps.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, experiment in _SUBCOMMANDS.items():
        p = sub.add_parser(name, help=f"run the {experiment} experiment")
        _add_common_options(p)
    chan = sub.add_parser("channels", help="print schedule and channel diagnostics")
    _add_common_options(chan)
    return parser


def _add_common_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nodes", type=str, default=None, help="comma list of node counts")
    p.add_argument("--family", choices=("er", "sbm", "powerlaw"), default=None)
    p.add_argument("--beta", type=float, default=None, help="flip probability in [0,1]")
    p.add_argument("--schedule-start", type=float, default=None)
    p.add_argument("--schedule-end", type=float, default=None)
    p.add_argument("--steps", type=str, default=None, help="comma list of step counts")
    p.add_argument("--gamma", type=str, default=None, help="comma list of coupling values")
    p.add_argument("--tau-x", type=float, default=None)
    p.add_argument("--dfeat", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", type=str, default=None, help="CSV output path")
    p.add_argument("--json-out", type=str, default=None, help="JSON fit-summary path")
    p.add_argument("--config", type=str, default=None, help="key=value config file")
    p.add_argument("--plot", action="store_true", default=None, help="render a PNG next to the CSV")
    p.add_argument("--dump-config", type=str, default=None, help="write the effective config and exit")


_FLAG_TO_ATTR = {
    "nodes": ("sizes", lambda s: _parse_int_list(s, "nodes")),
    "family": ("family", str),
    "beta": ("beta", float),
    "schedule_start": ("schedule_start", float),
    "schedule_end": ("schedule_end", float),
    "steps": ("step_counts", lambda s: _parse_int_list(s, "steps")),
    "gamma": ("gammas", lambda s: _parse_float_list(s, "gamma")),
    "tau_x": ("tau_x", float),
    "dfeat": ("d_f", int),
    "trials": ("trials", int),
    "seed": ("base_seed", int),
    "threads": ("threads", int),
    "out": ("out_path", str),
    "json_out": ("json_path", str),
    "plot": ("plot", bool),
}


def _build_config(experiment: str, args: argparse.Namespace) -> SweepConfig:
    config = default_config(experiment)
    if args.config:
        config = replace(config, **load_config(args.config))
    overrides = {}
    for flag, (attr, parser) in _FLAG_TO_ATTR.items():
        value = getattr(args, flag)
        if value is not None:
            overrides[attr] = parser(value) if not isinstance(value, bool) else value
    if overrides:
        config = replace(config, **overrides)
    env_seed = os.environ.get("GRAPHDIFF_SEED")
    if env_seed is not None:
        try:
            config = replace(config, base_seed=int(env_seed))
        except ValueError as exc:
            raise ValueError(f"GRAPHDIFF_SEED must be an integer, got {env_seed!r}") from exc
    if config.out_path is None:
        config = replace(config, out_path=f"{experiment}.csv")
    return config


def _run_channels(args: argparse.Namespace) -> int:
    config = _build_config("mdep", args)
    start, end = config.effective_schedule
    schedule = linear_schedule(start, end, max(config.step_counts))
    print("step beta cumulative_flip_prob")
    for i in range(1, schedule.steps + 1):
        print(f"{i} {schedule.betas[i - 1]:.6g} {compose_flip_prob(schedule, i):.6g}")
    print(f"poisson_flip_prob(lam=1, t=1) = {poisson_flip_prob(1.0, 1.0):.6g}")
    return 0


def parse_and_dispatch(argv) -> int:
    """Parse argv, run the requested experiment, print fit summary lines."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand == "channels":
        return _run_channels(args)

    experiment = _SUBCOMMANDS[args.subcommand]
    config = _build_config(experiment, args)

    if args.dump_config:
        _dump_config(config, args.dump_config)
        print(f"wrote {args.dump_config}")
        return 0

    result = run_sweep(config)
    for summary in result.fits:
        fit = summary.fit
        print(
            f"metric={summary.metric} slope={fit.slope:.6g}±{fit.slope_ci_halfwidth:.6g} "
            f"r2={fit.r_squared:.6g}"
        )
    for note in result.extras.get("fit_skipped", []):
        print(f"metric={note['metric']} fit skipped: {note['reason']}")
    if config.experiment == "gamma_sweep":
        rho = result.extras.get("spearman_rho", float("nan"))
        reduction = result.extras.get("reduction_low_to_high", float("nan"))
        print(f"spearman_rho={rho:.6g} reduction={reduction:.6g}")
    if config.out_path:
        print(f"wrote {config.out_path}")
    if config.json_path:
        print(f"wrote {config.json_path}")
    return 0


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        return parse_and_dispatch(list(argv))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DegenerateFitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
