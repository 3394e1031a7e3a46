import math

import numpy as np
import pytest

from tailsep import (
    DegenerateDataError,
    InsufficientDataError,
    ParentDistribution,
    ScanOptions,
    builtin_table,
    detect,
    ideal_case_sample,
    mc_experiment,
    parent_sample,
    scan,
)


@pytest.fixture(scope="module")
def table():
    return builtin_table()


def test_ideal_exponential_grid():
    d = ParentDistribution("exponential", sigma=1.0)
    x = ideal_case_sample(d, 4)
    expected = [-math.log(1 - k / 4) for k in (1, 2, 3)] + [-math.log(1 / 8)]
    np.testing.assert_allclose(x, expected, atol=1e-12)
    assert x[-1] == pytest.approx(2.0794, abs=5e-5)


def test_ideal_normal_median_point():
    d = ParentDistribution("normal", mu=0.0, sigma=1.0)
    x = ideal_case_sample(d, 2)
    assert x[0] == pytest.approx(0.0, abs=1e-12)


def test_ideal_gpd_first_point():
    d = ParentDistribution("gpd", sigma=1.0, xi=0.5)
    x = ideal_case_sample(d, 4)
    assert x[0] == pytest.approx(((3 / 4) ** -0.5 - 1) / 0.5, abs=1e-12)


def test_ideal_bounded_parent_uses_endpoint():
    d = ParentDistribution("gpd", sigma=1.0, xi=-0.5)
    x = ideal_case_sample(d, 10)
    assert x[-1] == pytest.approx(2.0, abs=1e-12)


def test_ideal_too_short():
    with pytest.raises(InsufficientDataError):
        ideal_case_sample(ParentDistribution("exponential"), 1)


def test_scan_row_shape_and_support():
    rng = np.random.default_rng(1)
    x = rng.lognormal(0.0, 1.0, 120)
    rows = scan(x)
    assert len(rows) == x.size - 1
    assert [r.k for r in rows] == list(range(2, x.size + 1))
    x_desc = np.sort(x)[::-1]
    for r in rows[::13]:
        y = x_desc[: r.k] - x_desc[r.k - 1]
        assert np.all(1.0 + r.xi_k * y / r.sigma_k > 0)
        assert r.au2 >= 0 and r.w2 >= 0 and r.a2 >= 0


def test_scan_errors():
    with pytest.raises(InsufficientDataError):
        scan([1.0, 2.0])
    with pytest.raises(DegenerateDataError):
        scan([3.0, 3.0, 3.0])
    with pytest.raises(ValueError):
        scan([1.0, np.nan, 2.0])


def test_scan_au2_shrinks_toward_boundary_for_gpd_grid():
    d = ParentDistribution("gpd", sigma=1.0, xi=0.5)
    x = ideal_case_sample(d, 2000)
    rows = scan(x)
    au = np.array([r.au2 for r in rows])
    assert au[-1] < au[au.size // 2] < au[au.size // 10]
    assert au[-1] < 2e-3


def test_detect_ideal_gpd_boundary(table):
    d = ParentDistribution("gpd", sigma=1.0, xi=0.5)
    x = ideal_case_sample(d, 1000)
    model = detect(x, table)
    assert model.k_star >= x.size - 1
    assert model.params.xi == pytest.approx(0.5, abs=0.02)


def test_detect_ideal_normal_small_tail_fraction(table):
    d = ParentDistribution("normal", mu=0.0, sigma=1.0)
    x = ideal_case_sample(d, 2000)
    model = detect(x, table)
    assert model.tail_fraction < 0.20
    assert model.u == np.sort(x)[::-1][model.k_star - 1]
    assert set(model.gof) == {"W2", "A2", "AU2"}
    for entry in model.gof.values():
        assert entry["value"] >= 0


def test_detect_report_shape_on_random_sample(table):
    rng = np.random.default_rng(42)
    x = rng.lognormal(0.0, 1.0, 200)
    model = detect(x, table)
    assert 2 <= model.k_star <= 200
    assert model.n == 200
    pv = model.gof["AU2"]["p_value"]
    assert pv.censored in ("none", "high", "low")


def test_detect_small_tail_warns(table):
    # three near-identical points plus two far outliers force a tiny tail
    rng = np.random.default_rng(0)
    x = rng.normal(0.0, 1e-3, 40)
    x = np.concatenate([x, [50.0, 90.0]])
    model = detect(x, table)
    if model.k_star < 25:
        assert any("k*" in w for w in model.warnings)


def test_detect_deterministic(table):
    rng = np.random.default_rng(11)
    x = rng.lognormal(0.0, 1.0, 150)
    a = detect(x, table)
    b = detect(x, table)
    assert a == b


def test_detect_location_scale_invariance(table):
    rng = np.random.default_rng(21)
    x = rng.lognormal(0.0, 1.0, 300)
    base = detect(x, table)
    moved = detect(3.5 * x + 7.0, table)
    assert moved.k_star == base.k_star
    assert moved.u == pytest.approx(3.5 * base.u + 7.0, rel=1e-6)
    assert moved.params.xi == pytest.approx(base.params.xi, abs=1e-6)
    assert moved.params.sigma == pytest.approx(3.5 * base.params.sigma, rel=1e-6)


def test_detect_mc_p_value_mode(table):
    rng = np.random.default_rng(33)
    x = rng.lognormal(0.0, 1.0, 100)
    opts = ScanOptions(p_value_mode="mc", mc_reps=2000, mc_seed=4)
    model = detect(x, table, opts)
    for entry in model.gof.values():
        assert 0.0 <= entry["p_value"].value <= 1.0


def test_scan_options_validation():
    with pytest.raises(ValueError):
        ScanOptions(k_min_warn=1)
    with pytest.raises(ValueError):
        ScanOptions(p_value_mode="bootstrap")


def test_mc_experiment_single_rep_matches_scan():
    d = ParentDistribution("lognormal", mu=0.0, sigma=1.0)
    res = mc_experiment(d, n=80, reps=1, seed=123)
    seed = np.random.SeedSequence(123).spawn(1)[0]
    x = parent_sample(d, np.random.default_rng(seed), 80)
    rows = scan(x)
    np.testing.assert_allclose(res.mean_au2, [r.au2 for r in rows], rtol=1e-12)
    assert res.k_star[0] == int(np.argmin([r.au2 for r in rows])) + 2
    np.testing.assert_array_equal(res.band_lo, res.band_hi)


def test_mc_experiment_gpd_parent_edge_minimum():
    d = ParentDistribution("gpd", sigma=1.0, xi=0.5)
    res = mc_experiment(d, n=100, reps=300, seed=7)
    # the model is exact at every k here, so the mean curve is flat at the
    # edge; assert the boundary region sits at the global minimum level
    # rather than pinning the noise-driven argmin itself
    m = res.mean_au2
    assert m[-5:].min() <= 1.03 * m.min()
    assert m[:5].min() > 1.2 * m.min()
    assert res.k.shape == res.mean_au2.shape == res.band_lo.shape == res.band_hi.shape


def test_mc_experiment_normal_parent_interior_minimum():
    d = ParentDistribution("normal", mu=0.0, sigma=1.0)
    res = mc_experiment(d, n=100, reps=300, seed=13)
    assert 2 < res.mean_curve_k_star < 100
    assert np.all(res.band_lo <= res.band_hi)
    assert np.all((res.tail_fraction > 0) & (res.tail_fraction <= 1))
