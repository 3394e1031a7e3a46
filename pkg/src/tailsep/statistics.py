"""Weighted mean-square-error statistics for the lower and upper tail.

The two families share the weight w(t) = t^(-a) (1-t)^(-b) with one of the
exponents held at zero.  Named special cases: W2 (a=b=0, Cramer-von Mises),
A2 (a=b=1, Anderson-Darling) and AU2 (a=0, b=1, upper-tail weighted).

All statistics take an *ascending* vector of probabilities, i.e. the sorted
sample already mapped through the model CDF.  Probabilities are clamped to
[CLAMP_EPS, 1-CLAMP_EPS] inside logarithms and negative powers only; terms
that are exact at t=0 or t=1 (e.g. the a=1 / b=1 formulas at their harmless
end) are left untouched by construction.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DivergentStatisticError

CLAMP_EPS = 1e-12

# stress parameters where the statistic (or its risk) has no finite value
DIVERGENT_STRESS = 3.0


def _check_probs(probs) -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("probability vector must be a nonempty 1-D sequence")
    if np.any(p < 0) or np.any(p > 1):
        raise ValueError("probabilities must lie in [0, 1]")
    if np.any(np.diff(p) < 0):
        raise ValueError("probability vector must be ascending")
    return p


def _clamped(p: np.ndarray) -> np.ndarray:
    return np.clip(p, CLAMP_EPS, 1.0 - CLAMP_EPS)


def edf(sample, x: float) -> float:
    """Empirical distribution function: fraction of the sample <= x."""
    s = np.asarray(sample, dtype=float)
    if s.size == 0:
        raise ValueError("sample must be nonempty")
    return float(np.count_nonzero(s <= x)) / s.size


def lower_tail_stat(a: float, probs) -> float:
    """Lower-tail weighted mean-square-error statistic with stress a >= 0."""
    if a < 0:
        raise ValueError(f"stress parameter must be >= 0, got {a}")
    if a == DIVERGENT_STRESS:
        raise DivergentStatisticError("statistic diverges at stress parameter 3")
    t = _check_probs(probs)
    n = t.size
    i = np.arange(1, n + 1, dtype=float)
    tc = _clamped(t)
    if a == 1.0:
        terms = 2.0 * t - (2.0 * i - 1.0) / n * np.log(tc)
        return -1.5 * n + math.fsum(terms)
    if a == 2.0:
        terms = (2.0 * i - 1.0) / n / tc + 2.0 * np.log(tc)
        return math.fsum(terms)
    lead = 2.0 * n / ((1.0 - a) * (2.0 - a) * (3.0 - a))
    # clamp the power base only where the exponent is negative
    b1 = tc if a > 2.0 else t
    b2 = tc if a > 1.0 else t
    terms = (2.0 / (2.0 - a)) * b1 ** (2.0 - a) - (2.0 * i - 1.0) / n / (1.0 - a) * b2 ** (1.0 - a)
    return lead + math.fsum(terms)


def upper_tail_stat(b: float, probs) -> float:
    """Upper-tail weighted mean-square-error statistic with stress b >= 0."""
    if b < 0:
        raise ValueError(f"stress parameter must be >= 0, got {b}")
    if b == DIVERGENT_STRESS:
        raise DivergentStatisticError("statistic diverges at stress parameter 3")
    t = _check_probs(probs)
    n = t.size
    i = np.arange(1, n + 1, dtype=float)
    coef = (2.0 * (n - i) + 1.0) / n
    s = _clamped(1.0 - t)
    if b == 1.0:
        terms = 2.0 * t + coef * np.log(s)
        return 0.5 * n - math.fsum(terms)
    if b == 2.0:
        terms = coef / s + 2.0 * np.log(s)
        return math.fsum(terms)
    lead = 2.0 * n / ((1.0 - b) * (2.0 - b) * (3.0 - b))
    s_raw = 1.0 - t
    b1 = s if b > 2.0 else s_raw
    b2 = s if b > 1.0 else s_raw
    terms = (2.0 / (2.0 - b)) * b1 ** (2.0 - b) - coef / (1.0 - b) * b2 ** (1.0 - b)
    return lead + math.fsum(terms)


def cramer_von_mises(probs) -> float:
    """W2 statistic: 1/(12n) + sum ((2i-1)/(2n) - t_i)^2."""
    t = _check_probs(probs)
    n = t.size
    i = np.arange(1, n + 1, dtype=float)
    d = (2.0 * i - 1.0) / (2.0 * n) - t
    return 1.0 / (12.0 * n) + math.fsum(d * d)


def anderson_darling(probs) -> float:
    """A2 statistic: -n - sum (2i-1)/n [ln t_i + ln(1 - t_{n-i+1})]."""
    t = _check_probs(probs)
    n = t.size
    i = np.arange(1, n + 1, dtype=float)
    tc = _clamped(t)
    terms = (2.0 * i - 1.0) / n * (np.log(tc) + np.log(1.0 - tc[::-1]))
    return -n - math.fsum(terms)


def au2(probs) -> float:
    """Upper-tail statistic AU2, the b=1 member used for tail detection."""
    return upper_tail_stat(1.0, probs)


def risk_function(a: float) -> float:
    """Expected statistic value under the null: 1/((2-a)(3-a)).

    Valid for the lower-tail family in a and, by symmetry, the upper-tail
    family in b.  Poles at a=2 and a=3.
    """
    if a == 2.0 or a == 3.0:
        raise DivergentStatisticError(f"risk function has a pole at stress parameter {a}")
    return 1.0 / ((2.0 - a) * (3.0 - a))
