"""Loss transforms and VaR/CVaR from a fitted tail model."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distributions import SMALL_XI
from .errors import BelowTailError, InfiniteMeanError
from .tail_detect import TailModel

TRANSFORMS = ("identity", "negate", "neg-log-returns")


def to_losses(series, transform: str = "identity") -> np.ndarray:
    """Map a raw series into positive-loss space.

    "neg-log-returns" turns a price series S_t into -(ln S_t - ln S_{t-1});
    "negate" flips the sign; "identity" passes through.
    """
    x = np.asarray(series, dtype=float)
    if transform == "identity":
        return x.copy()
    if transform == "negate":
        return -x
    if transform == "neg-log-returns":
        if x.size < 2:
            raise ValueError("need at least 2 prices for log returns")
        if np.any(x <= 0):
            raise ValueError("prices must be strictly positive for log returns")
        return -np.diff(np.log(x))
    raise ValueError(f"unknown transform {transform!r}; one of {TRANSFORMS}")


def var(model: TailModel, level: float) -> float:
    """Tail-model quantile at the given confidence level.

    Inverts the GPD above the threshold, weighting by the tail fraction
    k*/n.  Levels whose quantile falls below the threshold are refused.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must lie in (0, 1), got {level}")
    frac = model.tail_fraction
    if 1.0 - level > frac:
        raise BelowTailError(
            f"level {level} lies below the tail model's reach "
            f"(needs 1 - level <= k*/n = {frac:.4f}); the empirical "
            f"quantile of the input sample should be used instead",
        )
    xi, sigma, u = model.params.xi, model.params.sigma, model.u
    scaled = (1.0 - level) / frac
    if abs(xi) < SMALL_XI:
        return u - sigma * np.log(scaled)
    return u + sigma / xi * np.expm1(-xi * np.log(scaled))


def cvar(model: TailModel, level: float, *, mean_excess_from_threshold: bool = False) -> float:
    """VaR plus the GPD mean excess.

    Default convention evaluates the mean excess with the VaR as location:
    VaR + (sigma + xi*VaR)/(1 - xi).  The alternative measures the excess
    from the threshold instead: VaR + (sigma + xi*(VaR - u))/(1 - xi).
    """
    xi, sigma = model.params.xi, model.params.sigma
    if xi >= 1.0:
        raise InfiniteMeanError(f"CVaR is infinite for xi={xi} >= 1")
    v = var(model, level)
    loc = v - model.u if mean_excess_from_threshold else v
    return v + (sigma + xi * loc) / (1.0 - xi)


def delta_s(s0: float, var_log: float) -> float:
    """Monetary loss S0*(exp(VaR) - 1) for a log-return VaR."""
    if not s0 > 0:
        raise ValueError(f"price must be positive, got {s0}")
    return s0 * np.expm1(var_log)


@dataclass(frozen=True)
class RiskReport:
    levels: tuple
    var: dict  # level -> value (absent when below tail reach)
    cvar: dict
    tail_fraction: float
    model: TailModel
    flagged_levels: tuple = ()
    delta_s: dict = field(default_factory=dict)  # level -> monetary loss


def risk_report(model: TailModel, levels, s0: float | None = None,
                mean_excess_from_threshold: bool = False) -> RiskReport:
    """VaR/CVaR per confidence level; unreachable levels are flagged."""
    levels = tuple(float(l) for l in levels)
    vars_, cvars, ds, flagged = {}, {}, {}, []
    for level in levels:
        try:
            v = var(model, level)
        except BelowTailError:
            flagged.append(level)
            continue
        vars_[level] = v
        cvars[level] = cvar(model, level,
                            mean_excess_from_threshold=mean_excess_from_threshold)
        if s0 is not None:
            ds[level] = delta_s(s0, v)
    return RiskReport(
        levels=levels,
        var=vars_,
        cvar=cvars,
        tail_fraction=model.tail_fraction,
        model=model,
        flagged_levels=tuple(flagged),
        delta_s=ds,
    )
