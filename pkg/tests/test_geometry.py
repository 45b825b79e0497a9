import math

import numpy as np
import pytest
from scipy import stats

from relaylab.geometry import (FieldClass, PointField, SimulationRegion, SingularDistanceError,
                               sample_ppp, sample_ppp_batch, shot_noise, shot_noise_batch)
from relaylab.laplace import laplace_single


def test_zero_density_gives_empty_field(rng):
    f = sample_ppp(0.0, SimulationRegion(), rng)
    assert len(f) == 0
    assert shot_noise(f, (0.0, 0.0), 1.0, 4.0) == 0.0


def test_negative_density_rejected(rng):
    with pytest.raises(ValueError):
        sample_ppp(-1.0, SimulationRegion(), rng)


def test_single_point_hand_value():
    f = PointField([[2.0, 0.0]], [1.0], region=SimulationRegion(radius=10))
    assert shot_noise(f, (0.0, 0.0), 1.0, 4.0) == pytest.approx(1 / 16, rel=1e-15)


def test_singular_distance():
    f = PointField([[0.0, 0.0]], [1.0])
    with pytest.raises(SingularDistanceError, match="singular distance"):
        shot_noise(f, (0.0, 0.0), 1.0, 4.0)


def test_path_loss_must_exceed_two():
    f = PointField([[1.0, 0.0]], [1.0])
    with pytest.raises(ValueError):
        shot_noise(f, (0.0, 0.0), 1.0, 2.0)


def test_field_invariants():
    with pytest.raises(ValueError):
        PointField([[1.0, 0.0]], [1.0, 2.0])
    with pytest.raises(ValueError):
        PointField([[1.0, 0.0]], [-1.0])
    with pytest.raises(ValueError):
        PointField([[600.0, 0.0]], [1.0], region=SimulationRegion(radius=500))
    with pytest.raises(ValueError):
        SimulationRegion(radius=0.0)


def test_points_inside_region(rng):
    region = SimulationRegion((2.5, 0.0), 100.0)
    f = sample_ppp(0.01, region, rng, FieldClass.CARRIER)
    assert np.all(np.hypot(*(f.points - [2.5, 0.0]).T) <= 100.0)
    assert np.all(f.marks >= 0)


def test_poisson_mean_count():
    # 785.4 expected points on a 500 m disk at density 1e-3
    region = SimulationRegion(radius=500.0)
    b = sample_ppp_batch(1e-3, region, 10_000, np.random.default_rng(1))
    lam = 1e-3 * math.pi * 500 ** 2
    assert lam == pytest.approx(785.398, abs=1e-3)
    assert abs(b.counts.mean() - lam) < 3 * math.sqrt(lam / 10_000)


def test_poisson_counts_chi_square():
    region = SimulationRegion(radius=30.0)
    lam = 0.005 * region.area
    counts = sample_ppp_batch(0.005, region, 20_000, np.random.default_rng(2)).counts
    edges = np.arange(0, 40)
    obs = np.array([np.sum(counts == k) for k in edges[:-1]] + [np.sum(counts >= edges[-1])])
    exp = np.append(stats.poisson.pmf(edges[:-1], lam), stats.poisson.sf(edges[-1] - 1, lam))
    exp *= counts.size
    keep = exp > 5
    obs = np.append(obs[keep], obs[~keep].sum())
    exp = np.append(exp[keep], exp[~keep].sum())
    assert stats.chisquare(obs, exp, ddof=0).pvalue > 0.01


def test_independent_field_counts(params):
    from relaylab.relay_sim import layout
    _, _, _, region = layout(params)
    g = np.random.default_rng(3)
    a, b = g.spawn(2)
    ca = sample_ppp_batch(params.zeta, region, 4000, a).counts
    cb = sample_ppp_batch(params.zeta_tilde, region, 4000, b).counts
    assert abs(np.corrcoef(ca, cb)[0, 1]) < 3 / math.sqrt(4000)


def test_additive_and_linear(rng):
    region = SimulationRegion(radius=50.0)
    f = sample_ppp(0.01, region, rng)
    half = len(f) // 2
    A = PointField(f.points[:half], f.marks[:half], region=region)
    B = PointField(f.points[half:], f.marks[half:], region=region)
    rx = (0.3, -0.1)
    total = shot_noise(f, rx, 1.0, 3.0)
    assert shot_noise(A, rx, 1.0, 3.0) + shot_noise(B, rx, 1.0, 3.0) == pytest.approx(total, rel=1e-12)
    assert shot_noise(f, rx, 7.0, 3.0) == pytest.approx(7.0 * total, rel=1e-12)


def test_batch_matches_single_fields():
    region = SimulationRegion((2.5, 0.0), 40.0)
    g = np.random.default_rng(5)
    b = sample_ppp_batch(0.01, region, 50, g)
    marks = g.standard_exponential((2, b.size))
    out = shot_noise_batch(b, marks, [(0.0, 0.0), (5.0, 0.0)], 2.0, 4.0)
    for k in range(50):
        f = b.field(k, marks[0])
        assert out[0, k] == pytest.approx(shot_noise(f, (0.0, 0.0), 2.0, 4.0), rel=1e-10)
        f = b.field(k, marks[1])
        assert out[1, k] == pytest.approx(shot_noise(f, (5.0, 0.0), 2.0, 4.0), rel=1e-10)


def test_carrier_laplace_functional(params):
    # Table 1 carrier field: empirical E[exp(-s Q)] vs closed form, s = 1
    region = SimulationRegion((2.5, 0.0), 500.0)
    g = np.random.default_rng(6)
    b = sample_ppp_batch(params.zeta_tilde, region, 100_000, g)
    q = shot_noise_batch(b, g.standard_exponential(b.size), [(0.0, 0.0)],
                         params.Ptilde_T, params.alpha_tilde)[0]
    closed = laplace_single(1.0, params.Ptilde_T, params.zeta_tilde, params.alpha_tilde)
    assert np.mean(np.exp(-q)) == pytest.approx(closed, rel=0.01)


def test_far_field_mean_matches_integral():
    from scipy import integrate
    from relaylab.geometry import far_field_mean
    for alpha in (3.0, 4.0):
        ref = integrate.quad(lambda r: 2 * np.pi * r * 1e-3 * 10.0 * r ** -alpha, 500, np.inf)[0]
        assert far_field_mean(1e-3, 10.0, alpha, 500.0) == pytest.approx(ref, rel=1e-10)
    assert far_field_mean(0.0, 10.0, 3.0, 500.0) == 0.0
    with pytest.raises(ValueError):
        far_field_mean(1e-3, 10.0, 2.0, 500.0)
