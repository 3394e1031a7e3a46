"""Maximum-likelihood GPD fitting for nonnegative excess vectors.

The optimization itself lives in :mod:`tailsep._kernels`; this module adds
validation, the FitResult record and a plain-Python likelihood evaluator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .distributions import SMALL_XI, GpdParams
from .errors import DegenerateDataError, InsufficientDataError


@dataclass(frozen=True)
class FitResult:
    params: GpdParams
    log_likelihood: float
    converged: bool
    method: str  # "mle" or "moment-fallback"
    iterations: int

    @property
    def xi(self) -> float:
        return self.params.xi

    @property
    def sigma(self) -> float:
        return self.params.sigma


def neg_log_likelihood(params: GpdParams, excesses) -> float:
    """-sum log f(y; xi, sigma); +inf if any excess violates the support."""
    y = np.asarray(excesses, dtype=float)
    if y.size == 0:
        raise ValueError("excesses must be nonempty")
    if np.any(y < 0):
        raise ValueError("excesses must be nonnegative")
    xi, sigma = params.xi, params.sigma
    z = y / sigma
    if abs(xi) < SMALL_XI:
        return float(y.size * np.log(sigma) + np.sum(z))
    arg = 1.0 + xi * z
    if np.any(arg <= 0):
        return np.inf
    return float(y.size * np.log(sigma) + (1.0 + 1.0 / xi) * np.sum(np.log(arg)))


def fit_mle(excesses) -> FitResult:
    """Fit GPD parameters to nonnegative excesses by profile-likelihood MLE.

    Falls back to probability-weighted-moment estimates (``converged=False``)
    when the likelihood search finds no finite optimum.
    """
    y = np.asarray(excesses, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise InsufficientDataError(f"need at least 2 excesses, got {y.size}")
    if np.any(y < 0):
        raise ValueError("excesses must be nonnegative")
    if np.all(y == y[0]):
        raise DegenerateDataError("all excesses are equal; no scale information")
    y_asc = np.sort(y)
    xi, sigma, nll, conv, evals = _kernels.fit_gpd(y_asc, False, 0.0)
    params = GpdParams(float(xi), float(sigma))
    if conv == 1 and np.isfinite(nll):
        return FitResult(params, -float(nll), True, "mle", int(evals))
    return FitResult(
        params, -neg_log_likelihood(params, y_asc), False, "moment-fallback", int(evals)
    )
