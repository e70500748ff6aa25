"""Graph corruption channels, noise-rate posteriors, Bayesian denoising
targets, multi-step error propagation, and a reproducible sweep harness."""

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
    CoupledState,
    NoiseSchedule,
    NoisyGraph,
    apply_schedule,
    bernoulli_flip,
    bernoulli_flip_feature_hybrid,
    beta_channel,
    compose_flip_prob,
    coupled_corrupt,
    coupled_noise_moments,
    linear_schedule,
    multinomial_channel,
    poisson_flip_prob,
)
from .posterior import (
    BetaPosterior,
    PriorSpec,
    beta_posterior,
    dependent_flip_variance_check,
    estimate_tau_x,
    posterior_grid_oracle,
    posterior_mean_estimator,
    scale_free_exponent,
    variance_asymptotic,
)
from .propagation import (
    BoundSpec,
    TrajectoryReport,
    coupled_reconstruction,
    geometric_bound,
    jmep_trajectory,
    mdep_trajectory,
)
from .targets import (
    DeviationReport,
    TargetField,
    beta_noise_posterior_mean,
    conditional_target,
    edge_posterior_conditional,
    feature_target,
    lipschitz_probe,
    multinomial_posterior,
    target_deviation,
    unconditional_target,
)
from .harness import (
    EXPERIMENTS,
    DegenerateFitError,
    FitSummary,
    RegressionFit,
    Row,
    SweepConfig,
    SweepResult,
    confidence_interval,
    default_config,
    export_csv,
    fits_from_rows,
    loglog_fit,
    read_rows,
    run_sweep,
    spearman_rho,
)

__version__ = "0.1.0"
