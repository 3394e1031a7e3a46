import math

import numpy as np
import pytest

from tailsep import (
    BelowTailError,
    GpdParams,
    InfiniteMeanError,
    builtin_table,
    cvar,
    delta_s,
    detect,
    gpd_cdf,
    risk_report,
    to_losses,
    var,
)
from tailsep.tail_detect import TailModel


def make_model(u, xi, sigma, k_star, n):
    return TailModel(
        u=u, k_star=k_star, n=n, params=GpdParams(xi, sigma), gof={}, warnings=[]
    )


WEEKLY = make_model(0.020, 0.215, 0.011, 289, 2503)
MONTHLY = make_model(0.027, -0.040, 0.037, 95, 575)


def test_to_losses_negate():
    np.testing.assert_allclose(to_losses([1.0, -2.0], "negate"), [-1.0, 2.0])


def test_to_losses_log_returns():
    got = to_losses([100.0, 90.0], "neg-log-returns")
    np.testing.assert_allclose(got, [-math.log(0.9)], rtol=1e-12)
    assert got[0] == pytest.approx(0.10536, abs=5e-6)


def test_to_losses_identity():
    x = [3.0, 1.0, 2.0]
    np.testing.assert_allclose(to_losses(x, "identity"), x)


def test_to_losses_errors():
    with pytest.raises(ValueError):
        to_losses([100.0, -1.0], "neg-log-returns")
    with pytest.raises(ValueError):
        to_losses([100.0], "neg-log-returns")
    with pytest.raises(ValueError):
        to_losses([1.0], "unknown")


def test_var_weekly_99():
    assert var(WEEKLY, 0.99) == pytest.approx(0.056, abs=1e-3)
    assert var(WEEKLY, 0.99) == pytest.approx(0.0554, abs=5e-4)


def test_var_weekly_999():
    assert var(WEEKLY, 0.999) == pytest.approx(0.112, abs=2e-3)


def test_var_monthly_99():
    assert var(MONTHLY, 0.99) == pytest.approx(0.126, abs=2e-3)


def test_cvar_weekly_levels():
    assert cvar(WEEKLY, 0.99) == pytest.approx(0.085, abs=1e-3)
    assert cvar(WEEKLY, 0.999) == pytest.approx(0.157, abs=2e-3)
    assert var(WEEKLY, 0.95) == pytest.approx(0.030, abs=1e-3)
    assert cvar(WEEKLY, 0.95) == pytest.approx(0.053, abs=1e-3)


def test_cvar_alternative_convention_differs():
    default = cvar(WEEKLY, 0.99)
    alt = cvar(WEEKLY, 0.99, mean_excess_from_threshold=True)
    assert alt < default
    # the alternative misses the reference value by several percent
    assert abs(alt - 0.085) > 0.003


def test_var_level_domain():
    with pytest.raises(ValueError):
        var(WEEKLY, 1.0)
    with pytest.raises(ValueError):
        var(WEEKLY, 0.0)


def test_var_below_tail_reach():
    with pytest.raises(BelowTailError):
        var(WEEKLY, 0.80)  # 1-level=0.2 > 289/2503


def test_cvar_infinite_mean():
    heavy = make_model(1.0, 1.2, 1.0, 50, 500)
    with pytest.raises(InfiniteMeanError):
        cvar(heavy, 0.99)


def test_var_monotone_and_cvar_dominates():
    last = None
    for level in (0.95, 0.97, 0.99, 0.995, 0.999):
        v = var(WEEKLY, level)
        assert cvar(WEEKLY, level) > v
        if last is not None:
            assert v > last
        last = v


def test_var_consistent_with_gpd_cdf():
    for level in (0.95, 0.99, 0.999):
        v = var(WEEKLY, level)
        target = 1.0 - (1.0 - level) * WEEKLY.n / WEEKLY.k_star
        assert gpd_cdf(WEEKLY.params, v - WEEKLY.u) == pytest.approx(target, abs=1e-9)


def test_var_small_xi_continuity():
    for s in (1e-9, -1e-9):
        near = make_model(0.027, s, 0.037, 95, 575)
        zero = make_model(0.027, 0.0, 0.037, 95, 575)
        assert abs(var(near, 0.99) - var(zero, 0.99)) < 1e-7


def test_delta_s():
    assert delta_s(100.0, 0.0) == 0.0
    assert delta_s(100.0, math.log(2)) == pytest.approx(100.0, rel=1e-12)
    assert delta_s(2000.0, 0.056) == pytest.approx(115.2, abs=0.05)
    with pytest.raises(ValueError):
        delta_s(0.0, 0.1)


def test_risk_report_flags_unreachable_levels():
    rep = risk_report(WEEKLY, [0.80, 0.95, 0.99], s0=2000.0)
    assert rep.flagged_levels == (0.80,)
    assert 0.80 not in rep.var
    assert rep.var[0.99] == pytest.approx(0.0554, abs=5e-4)
    assert rep.delta_s[0.99] == pytest.approx(2000.0 * math.expm1(rep.var[0.99]))
    assert rep.tail_fraction == pytest.approx(289 / 2503)


def test_negation_round_trip():
    table = builtin_table()
    rng = np.random.default_rng(17)
    x = -rng.lognormal(0.0, 1.0, 250)  # heavy lower tail
    direct = detect(-x, table)
    via_transform = detect(to_losses(x, "negate"), table)
    assert via_transform.k_star == direct.k_star
    assert via_transform.params.xi == pytest.approx(direct.params.xi, abs=1e-12)
    assert via_transform.u == pytest.approx(direct.u, abs=1e-12)
    # and the threshold maps back to the original coordinates by sign flip
    assert -via_transform.u in x or np.isclose(-via_transform.u, x).any()
