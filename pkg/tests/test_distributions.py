import math

import numpy as np
import pytest
from scipy.integrate import quad

from tailsep import (
    GpdParams,
    InfiniteMeanError,
    ParentDistribution,
    gpd_cdf,
    gpd_mean_excess,
    gpd_pdf,
    gpd_quantile,
    gpd_sample,
    parent_cdf,
    parent_quantile,
    parent_sample,
)
from tailsep.distributions import gpd_mean


def test_gpd_cdf_examples():
    assert gpd_cdf(GpdParams(0.5, 1.0), 2.0) == pytest.approx(0.75, abs=1e-12)
    assert gpd_cdf(GpdParams(0.0, 1.0), 0.0) == 0.0
    assert gpd_cdf(GpdParams(0.0, 2.0), 2.0) == pytest.approx(1 - math.exp(-1), abs=1e-12)


def test_gpd_cdf_off_support():
    assert gpd_cdf(GpdParams(0.5, 1.0), -1.0) == 0.0
    assert gpd_cdf(GpdParams(-0.5, 1.0), 2.0) == 1.0
    assert gpd_cdf(GpdParams(-0.5, 1.0), 5.0) == 1.0


def test_gpd_pdf_examples():
    assert gpd_pdf(GpdParams(0.5, 1.0), 0.0) == pytest.approx(1.0, abs=1e-12)
    assert gpd_pdf(GpdParams(-1.0, 1.0), 0.5) == pytest.approx(1.0, abs=1e-12)
    assert gpd_pdf(GpdParams(0.5, 1.0), 2.0) == pytest.approx(0.125, abs=1e-12)
    assert gpd_pdf(GpdParams(0.5, 1.0), -0.5) == 0.0


def test_gpd_quantile_examples():
    assert gpd_quantile(GpdParams(0.5, 1.0), 0.75) == pytest.approx(2.0, abs=1e-12)
    assert gpd_quantile(GpdParams(-0.3, 2.0), 0.0) == 0.0
    assert gpd_quantile(GpdParams(0.0, 1.0), 1 - math.exp(-1)) == pytest.approx(1.0, abs=1e-12)


def test_gpd_quantile_domain():
    with pytest.raises(ValueError):
        gpd_quantile(GpdParams(0.5, 1.0), 1.0)
    with pytest.raises(ValueError):
        gpd_quantile(GpdParams(0.5, 1.0), -0.1)


@pytest.mark.parametrize("xi", [-0.5, -0.25, 0.0, 0.25, 0.5, 0.9])
def test_gpd_round_trip(xi):
    params = GpdParams(xi, 1.3)
    qs = np.linspace(0.001, 0.999, 25)
    for q in qs:
        x = gpd_quantile(params, q)
        assert gpd_cdf(params, x) == pytest.approx(q, abs=1e-9)


@pytest.mark.parametrize("xi", [-0.5, -0.25, 0.0, 0.25, 0.5, 0.9])
def test_gpd_pdf_integrates_to_one(xi):
    params = GpdParams(xi, 1.0)
    # split at quantiles so each piece is well scaled for heavy tails
    knots = [gpd_quantile(params, q) for q in [0.0, 0.5, 0.9, 0.99, 1 - 1e-4, 1 - 1e-7]]
    hi = params.upper_endpoint
    knots.append(hi if np.isfinite(hi) else gpd_quantile(params, 1 - 1e-13))
    total = sum(
        quad(lambda x: gpd_pdf(params, x), a, b, limit=400)[0]
        for a, b in zip(knots[:-1], knots[1:])
    )
    assert total == pytest.approx(1.0, abs=1e-6)


def test_continuity_at_xi_zero():
    xs = np.linspace(0.0, 10.0, 50)
    for x in xs:
        lo = gpd_cdf(GpdParams(1e-9, 2.0), x)
        ex = gpd_cdf(GpdParams(0.0, 2.0), x)
        assert abs(lo - ex) < 1e-7


def test_sigma_must_be_positive():
    with pytest.raises(ValueError):
        GpdParams(0.5, 0.0)
    with pytest.raises(ValueError):
        GpdParams(0.5, -1.0)


def test_gpd_mean_excess():
    assert gpd_mean_excess(GpdParams(0.0, 1.0), 3.7) == pytest.approx(1.0)
    assert gpd_mean_excess(GpdParams(0.5, 2.0), 4.0) == pytest.approx(8.0)
    v = gpd_mean_excess(GpdParams(0.215, 0.011), 0.056)
    assert v == pytest.approx(0.0293, abs=5e-4)
    assert 0.056 + v == pytest.approx(0.085, abs=1e-3)


def test_gpd_mean_excess_infinite_mean():
    with pytest.raises(InfiniteMeanError):
        gpd_mean_excess(GpdParams(1.0, 1.0), 0.0)


@pytest.mark.parametrize("xi", [-0.25, 0.0, 0.25])
def test_sample_mean_matches_moment(xi):
    params = GpdParams(xi, 1.0)
    rng = np.random.default_rng(1234)
    x = gpd_sample(params, rng, 1_000_000)
    mean = gpd_mean(params)
    # variance exists for xi < 0.5: sigma^2 / ((1-xi)^2 (1-2xi))
    sd = math.sqrt(1.0 / ((1 - xi) ** 2 * (1 - 2 * xi)))
    se = sd / math.sqrt(x.size)
    assert abs(x.mean() - mean) < 3 * se


def test_sampler_deterministic():
    params = GpdParams(0.3, 1.0)
    a = gpd_sample(params, np.random.default_rng(9), 100)
    b = gpd_sample(params, np.random.default_rng(9), 100)
    np.testing.assert_array_equal(a, b)


def test_parent_normal_cdf():
    d = ParentDistribution("normal", mu=0.0, sigma=1.0)
    assert parent_cdf(d, 0.0) == pytest.approx(0.5, abs=1e-12)


def test_parent_exponential_quantile():
    d = ParentDistribution("exponential", sigma=1.0)
    assert parent_quantile(d, 1 - math.exp(-1)) == pytest.approx(1.0, abs=1e-10)


def test_parent_gev_cdf():
    d = ParentDistribution("gev", mu=0.0, sigma=1.0, xi=0.5)
    assert parent_cdf(d, 0.0) == pytest.approx(math.exp(-1), abs=1e-10)


@pytest.mark.parametrize(
    "d",
    [
        ParentDistribution("lognormal", mu=0.0, sigma=1.0),
        ParentDistribution("normal", mu=0.0, sigma=1.0),
        ParentDistribution("gev", mu=0.0, sigma=1.0, xi=0.5),
        ParentDistribution("gpd", sigma=1.0, xi=0.5),
        ParentDistribution("exponential", sigma=1.0),
    ],
)
def test_parent_round_trip(d):
    for q in np.linspace(0.01, 0.99, 20):
        x = parent_quantile(d, q)
        assert parent_cdf(d, x) == pytest.approx(q, abs=1e-10)


def test_parent_sampler_deterministic():
    d = ParentDistribution("lognormal", mu=0.0, sigma=1.0)
    a = parent_sample(d, np.random.default_rng(4), 50)
    b = parent_sample(d, np.random.default_rng(4), 50)
    np.testing.assert_array_equal(a, b)


def test_parent_invalid_parameters():
    with pytest.raises(ValueError):
        ParentDistribution("normal", mu=0.0, sigma=-1.0)
    with pytest.raises(ValueError):
        ParentDistribution("weibull", sigma=1.0)
