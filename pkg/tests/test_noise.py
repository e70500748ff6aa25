import math

import numpy as np
import pytest

from graphdiff.graphs import SbmSpec, generate_er, generate_sbm
from graphdiff.noise import (
    CoupledParams,
    NoiseSchedule,
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


def chain_flip_prob(betas):
    """Independent oracle: propagate the {agrees, differs} distribution."""
    dist = {"same": 1.0, "diff": 0.0}
    for b in betas:
        dist = {
            "diff": dist["diff"] * (1.0 - b) + dist["same"] * b,
            "same": dist["same"] * (1.0 - b) + dist["diff"] * b,
        }
    return dist["diff"]


def test_flip_zero_and_one_are_identity_and_complement():
    g = generate_er(20, 0.3, seed=1)
    same = bernoulli_flip(g, 0.0, seed=2)
    assert same.flip_count == 0
    assert np.array_equal(same.pairs, g.pairs)
    flipped = bernoulli_flip(g, 1.0, seed=2)
    assert flipped.flip_count == g.num_pairs
    assert np.array_equal(flipped.pairs, ~g.pairs)


def test_flip_count_binomial_band():
    g = generate_sbm(SbmSpec(n=300), seed=0)
    noisy = bernoulli_flip(g, 0.2, seed=1)
    m = g.num_pairs
    assert abs(noisy.flip_count - 0.2 * m) < 4 * math.sqrt(m * 0.2 * 0.8)


def test_flip_rejects_bad_beta():
    g = generate_er(10, 0.5, seed=0)
    with pytest.raises(ValueError):
        bernoulli_flip(g, -0.1, seed=0)


def test_double_corruption_composes():
    # beta then beta' matches a single pass at beta + beta' - 2*beta*beta'
    g = generate_er(40, 0.3, seed=3)
    b1, b2 = 0.15, 0.25
    combined = b1 + b2 - 2 * b1 * b2
    twice, once = [], []
    for s in range(200):
        n1 = bernoulli_flip(g, b1, seed=1000 + s)
        n2 = bernoulli_flip(
            type(g)(n=g.n, pairs=n1.pairs), b2, seed=5000 + s
        )
        twice.append(int(np.count_nonzero(n2.pairs ^ g.pairs)))
        once.append(bernoulli_flip(g, combined, seed=9000 + s).flip_count)
    m = g.num_pairs
    sigma = math.sqrt(2 * m * combined * (1 - combined) / 200)
    assert abs(np.mean(twice) - np.mean(once)) < 4 * sigma


def test_linear_schedule_values():
    assert linear_schedule(0.1, 0.1, 5).betas == (0.1,) * 5
    assert linear_schedule(0.0, 1.0, 2).betas == (0.0, 1.0)
    got = linear_schedule(0.001, 0.10, 4).betas
    assert got == pytest.approx((0.001, 0.034, 0.067, 0.10), abs=1e-12)
    with pytest.raises(ValueError):
        linear_schedule(0.1, 0.2, 0)


def test_compose_flip_prob_basics():
    s = NoiseSchedule((0.3,))
    assert compose_flip_prob(s, 1) == 0.3
    zeros = NoiseSchedule((0.0, 0.0, 0.0))
    assert compose_flip_prob(zeros, 3) == 0.0
    two = NoiseSchedule((0.1, 0.1))
    assert compose_flip_prob(two, 2) == pytest.approx(0.18, abs=1e-15)
    with pytest.raises(ValueError):
        compose_flip_prob(two, 3)


def test_compose_flip_prob_matches_chain_bitwise():
    rng = np.random.default_rng(12)
    for _ in range(50):
        t = int(rng.integers(1, 65))
        betas = tuple(float(b) for b in rng.random(t))
        schedule = NoiseSchedule(betas)
        for upto in (1, t):
            assert compose_flip_prob(schedule, upto) == chain_flip_prob(betas[:upto])


def test_compose_matches_closed_form_product():
    rng = np.random.default_rng(3)
    for _ in range(50):
        betas = tuple(float(b) for b in rng.random(8))
        closed = (1.0 - np.prod([1.0 - 2.0 * b for b in betas])) / 2.0
        assert compose_flip_prob(NoiseSchedule(betas), 8) == pytest.approx(closed, abs=1e-12)


def test_apply_schedule_flip_count_band():
    g = generate_er(60, 0.2, seed=4)
    schedule = linear_schedule(0.1, 0.1, 4)
    p_bar = compose_flip_prob(schedule, 4)
    counts = [apply_schedule(g, schedule, seed=s).flip_count for s in range(200)]
    m = g.num_pairs
    assert abs(np.mean(counts) - p_bar * m) < 4 * math.sqrt(m * p_bar * (1 - p_bar) / 200)


def test_poisson_flip_prob_values_and_monotonicity():
    assert poisson_flip_prob(1.0, 0.0) == 0.0
    assert poisson_flip_prob(1.0, 10.0) > 0.4999
    assert poisson_flip_prob(1.0, 0.5) == pytest.approx((1 - math.exp(-1)) / 2, abs=1e-15)
    grid = np.linspace(0.0, 8.0, 200)
    vals = [poisson_flip_prob(1.0, t) for t in grid]
    assert all(b > a for a, b in zip(vals[:-1], vals[1:]))
    wide = [poisson_flip_prob(1.0, t) for t in np.linspace(0.0, 18.0, 200)]
    assert all(b >= a for a, b in zip(wide[:-1], wide[1:]))
    assert all(0.0 <= v < 0.5 for v in wide)
    with pytest.raises(ValueError):
        poisson_flip_prob(-1.0, 1.0)


def test_beta_channel_endpoints_and_mean():
    x0 = np.full(100, 0.37)
    assert np.array_equal(beta_channel(x0, 0.0, 2.0, 5.0, seed=0), x0)
    draws = beta_channel(np.zeros(100_000), 1.0, 2.0, 5.0, seed=1)
    mean = 2.0 / 7.0
    var = 2.0 * 5.0 / (49 * 8)
    assert abs(draws.mean() - mean) < 3 * math.sqrt(var / 100_000)
    # nearly-deterministic noise at its mean
    out = beta_channel(0.5, 0.5, 1e4, 1e4, seed=2)
    assert out == pytest.approx(0.5, abs=0.01)
    with pytest.raises(ValueError):
        beta_channel(0.5, 0.5, -1.0, 1.0, seed=0)


def test_multinomial_channel_identity_and_marginal():
    cats = np.arange(4).repeat(10)
    assert np.array_equal(multinomial_channel(cats, 0.0, np.full(4, 0.25), seed=0), cats)
    base = np.array([0.1, 0.2, 0.3, 0.4])
    out = multinomial_channel(np.zeros(100_000, dtype=int), 1.0, base, seed=3)
    freq = np.bincount(out, minlength=4) / 100_000
    for k in range(4):
        sigma = math.sqrt(base[k] * (1 - base[k]) / 100_000)
        assert abs(freq[k] - base[k]) < 4 * sigma
    assert multinomial_channel(0, 1.0, np.array([1.0]), seed=4) == 0
    with pytest.raises(ValueError):
        multinomial_channel(0, 0.5, np.array([0.5, 0.6]), seed=0)


def test_coupled_corrupt_independence_at_gamma_zero():
    g = generate_er(450, 0.1, seed=5)
    params = CoupledParams(sigma_a=1.0, sigma_x=1.0, gamma=0.0, d_f=8)
    x0 = np.zeros((450, 8))
    state = coupled_corrupt(g, x0, params, seed=6)
    iu, ju = np.triu_indices(450, k=1)
    noise = state.structure_pairs() - g.pairs.astype(float)
    shared = 0.5 * (state.latent_summaries[iu] + state.latent_summaries[ju])
    rho = np.corrcoef(noise, shared)[0, 1]
    assert abs(rho) < 0.02


def test_coupled_corrupt_deterministic_at_gamma_one():
    g = generate_er(50, 0.1, seed=7)
    params = CoupledParams(sigma_a=2.0, sigma_x=1.0, gamma=1.0, d_f=4)
    x0 = np.zeros((50, 4))
    state = coupled_corrupt(g, x0, params, seed=8)
    iu, ju = np.triu_indices(50, k=1)
    s = state.latent_summaries
    expected = g.pairs.astype(float) + 2.0 * 0.5 * (s[iu] + s[ju])
    assert np.allclose(state.structure_pairs(), expected, atol=1e-12)


def test_coupled_structural_variance():
    g = generate_er(450, 0.1, seed=9)
    params = CoupledParams(sigma_a=1.0, sigma_x=1.0, gamma=0.7, d_f=8)
    state = coupled_corrupt(g, np.zeros((450, 8)), params, seed=10)
    noise = state.structure_pairs() - g.pairs.astype(float)
    target = 1.0 - 0.7**2 / 2
    n_samples = noise.size
    assert abs(noise.var() - target) < 3 * target * math.sqrt(2 / n_samples)


def test_coupled_shared_latent_wiring():
    # correlation between pair noise and s_i + s_j is gamma / sqrt(2 (1 - gamma^2/2))
    gamma = 0.6
    g = generate_er(450, 0.1, seed=11)
    params = CoupledParams(sigma_a=1.0, sigma_x=1.0, gamma=gamma, d_f=8)
    state = coupled_corrupt(g, np.zeros((450, 8)), params, seed=12)
    iu, ju = np.triu_indices(450, k=1)
    noise = state.structure_pairs() - g.pairs.astype(float)
    s_sum = state.latent_summaries[iu] + state.latent_summaries[ju]
    expected = gamma / math.sqrt(2 * (1 - gamma**2 / 2))
    rho = np.corrcoef(noise, s_sum)[0, 1]
    assert rho == pytest.approx(expected, abs=0.03)


def test_coupled_noise_moments_formulas():
    assert coupled_noise_moments(CoupledParams(1.5, 1.0, 0.0, 2)) == (1.5**2, 1.0, min(1.5**2, 1.0))
    var_struct, _, min_eig = coupled_noise_moments(CoupledParams(1.0, 1.0, 0.99, 2))
    assert min_eig == pytest.approx(1 - 0.9801, abs=1e-12)
    assert var_struct == pytest.approx(1 - 0.99**2 / 2, abs=1e-12)
    assert coupled_noise_moments(CoupledParams(1.0, 1.0, 1.0, 2))[2] == pytest.approx(0.0, abs=1e-15)


def test_hybrid_channel_identity_and_variance():
    g = generate_er(50, 0.2, seed=13)
    x0 = np.random.default_rng(0).standard_normal((50, 8))
    noisy, xt = bernoulli_flip_feature_hybrid(g, 0.0, x0, 0.0, seed=14)
    assert noisy.flip_count == 0
    assert np.array_equal(xt, x0)

    big_x0 = np.random.default_rng(1).standard_normal((500, 100))
    _, noisy_x = bernoulli_flip_feature_hybrid(generate_er(500, 0.1, seed=2), 0.0, big_x0, 0.5, seed=15)
    n_comp = noisy_x.size
    assert abs(noisy_x.var(ddof=1) - 1.5) < 3 * 1.5 * math.sqrt(2 / n_comp)


def test_channels_deterministic_under_fixed_seed():
    g = generate_er(30, 0.3, seed=0)
    assert np.array_equal(bernoulli_flip(g, 0.4, seed=5).pairs, bernoulli_flip(g, 0.4, seed=5).pairs)
    a = beta_channel(np.full(10, 0.2), 0.7, 2.0, 3.0, seed=6)
    b = beta_channel(np.full(10, 0.2), 0.7, 2.0, 3.0, seed=6)
    assert np.array_equal(a, b)
