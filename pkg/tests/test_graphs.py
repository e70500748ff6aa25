import numpy as np
import pytest

from graphdiff.graphs import (
    Graph,
    PowerLawSpec,
    SbmSpec,
    degree_moments,
    generate_er,
    generate_powerlaw,
    generate_sbm,
    pair_count,
    pair_index,
)


def path_graph(n):
    pairs = np.zeros(pair_count(n), dtype=bool)
    pairs[pair_index(n, np.arange(n - 1), np.arange(1, n))] = True
    return Graph(n=n, pairs=pairs)


def test_pair_index_matches_triu_order():
    n = 7
    iu, ju = np.triu_indices(n, k=1)
    assert np.array_equal(pair_index(n, iu, ju), np.arange(pair_count(n)))


def test_graph_invariants_dense_roundtrip():
    g = generate_er(40, 0.3, seed=5)
    a = g.adjacency()
    assert np.array_equal(a, a.T)
    assert not a.diagonal().any()
    assert a[np.triu_indices(40, k=1)].sum() == g.edge_count
    assert 0.0 <= g.density_p0 <= 1.0


def test_er_trivial_probabilities():
    assert generate_er(5, 0.0, seed=1).edge_count == 0
    assert generate_er(5, 1.0, seed=1).edge_count == 10


def test_er_rejects_bad_parameters():
    with pytest.raises(ValueError):
        generate_er(1, 0.5, seed=0)
    with pytest.raises(ValueError):
        generate_er(10, 1.5, seed=0)


def test_er_edge_count_within_binomial_band():
    m = pair_count(1000)
    g = generate_er(1000, 0.1, seed=123)
    mean = m * 0.1
    sigma = np.sqrt(m * 0.1 * 0.9)
    assert abs(g.edge_count - mean) < 4 * sigma


def test_er_edge_count_mean_over_seeds():
    n, p, seeds = 40, 0.2, 250
    m = pair_count(n)
    counts = [generate_er(n, p, seed=s).edge_count for s in range(seeds)]
    assert abs(np.mean(counts) - m * p) < 4 * np.sqrt(m * p * (1 - p) / seeds)


def test_er_determinism():
    a = generate_er(100, 0.2, seed=9)
    b = generate_er(100, 0.2, seed=9)
    assert np.array_equal(a.pairs, b.pairs)


def test_sbm_deterministic_probabilities():
    g = generate_sbm(SbmSpec(n=6, k=3, p_intra=1.0, p_inter=0.0), seed=0)
    assert g.edge_count == 3
    assert np.array_equal(g.degrees(), np.ones(6, dtype=np.int64))


def test_sbm_expected_edge_count():
    spec = SbmSpec(n=300, k=3, p_intra=0.3, p_inter=0.05)
    sizes = spec.community_sizes()
    intra_pairs = sum(s * (s - 1) // 2 for s in sizes)
    inter_pairs = pair_count(300) - intra_pairs
    mean = intra_pairs * 0.3 + inter_pairs * 0.05
    var = intra_pairs * 0.3 * 0.7 + inter_pairs * 0.05 * 0.95
    g = generate_sbm(spec, seed=42)
    assert abs(g.edge_count - mean) < 4 * np.sqrt(var)


def test_sbm_single_community_matches_er():
    p = 0.25
    n = 60
    sbm_counts = [generate_sbm(SbmSpec(n=n, k=1, p_intra=p, p_inter=0.0), seed=s).edge_count for s in range(200)]
    er_counts = [generate_er(n, p, seed=10_000 + s).edge_count for s in range(200)]
    m = pair_count(n)
    pooled_sigma = np.sqrt(2 * m * p * (1 - p) / 200)
    assert abs(np.mean(sbm_counts) - np.mean(er_counts)) < 4 * pooled_sigma


def test_sbm_community_sizes_near_equal():
    sizes = SbmSpec(n=10, k=3).community_sizes()
    assert sizes == [4, 3, 3]
    assert max(sizes) - min(sizes) <= 1


def test_sbm_rejects_inverted_probabilities():
    with pytest.raises(ValueError):
        SbmSpec(n=10, k=2, p_intra=0.1, p_inter=0.5)


def test_powerlaw_simple_graph_invariants():
    g = generate_powerlaw(PowerLawSpec(n=10, alpha=3.0, k_min=1), seed=3)
    a = g.adjacency()
    assert np.array_equal(a, a.T)
    assert not a.diagonal().any()
    assert a.max() <= 1  # boolean: multi-edges impossible by construction


def test_powerlaw_rejects_small_alpha():
    with pytest.raises(ValueError):
        PowerLawSpec(n=100, alpha=2.0, k_min=1)


def test_powerlaw_second_moment_stable_for_steep_decay():
    # alpha = 6 has light tails: <k^2> should be flat in n (well below n^0.1 growth)
    moments = {}
    for n in (1000, 2000):
        vals = [degree_moments(generate_powerlaw(PowerLawSpec(n=n, alpha=6.0, k_min=2), seed=s))[1] for s in range(10)]
        moments[n] = np.mean(vals)
    growth = np.log(moments[2000] / moments[1000]) / np.log(2)
    assert growth < 0.1


def test_powerlaw_max_degree_scales_with_size():
    # alpha = 2.5: max degree should grow roughly like n^(1/(alpha-1)) = n^(2/3)
    med = {}
    for n in (1000, 4000, 16000):
        med[n] = np.median(
            [degree_moments(generate_powerlaw(PowerLawSpec(n=n, alpha=2.5, k_min=2), seed=s))[2] for s in range(5)]
        )
    slope = np.log(med[16000] / med[1000]) / np.log(16)
    assert 1 / 1.5 - 0.3 < slope < 1 / 1.5 + 0.3


def test_powerlaw_degree_histogram_slope():
    g = generate_powerlaw(PowerLawSpec(n=10_000, alpha=2.5, k_min=2), seed=11)
    deg = g.degrees()
    k_max = deg.max()
    edges = np.unique(np.geomspace(2, max(8, k_max / 4), 12).astype(int))
    counts, bounds = np.histogram(deg, bins=edges)
    widths = np.diff(bounds)
    centers = np.sqrt(bounds[:-1] * bounds[1:])
    keep = counts > 0
    density = counts[keep] / widths[keep]
    slope = np.polyfit(np.log(centers[keep]), np.log(density), 1)[0]
    assert abs(slope - (-2.5)) < 0.3


def test_degree_moments_fixtures():
    complete = Graph(n=4, pairs=np.ones(6, dtype=bool))
    assert degree_moments(complete) == (3.0, 9.0, 3)
    empty = Graph(n=4, pairs=np.zeros(6, dtype=bool))
    assert degree_moments(empty) == (0.0, 0.0, 0)
    path3 = path_graph(3)
    mean, second, k_max = degree_moments(path3)
    assert mean == pytest.approx(4 / 3)
    assert second == pytest.approx(2.0)
    assert k_max == 2


@pytest.mark.parametrize("seed", range(5))
def test_generators_symmetric_and_deterministic(seed):
    for make in (
        lambda s: generate_er(30, 0.2, seed=s),
        lambda s: generate_sbm(SbmSpec(n=30), seed=s),
        lambda s: generate_powerlaw(PowerLawSpec(n=30, alpha=3.0, k_min=1), seed=s),
    ):
        g1, g2 = make(seed), make(seed)
        assert np.array_equal(g1.pairs, g2.pairs)
        a = g1.adjacency()
        assert np.array_equal(a, a.T)
        assert not a.diagonal().any()
