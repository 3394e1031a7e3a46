"""Closed-form CDFs, densities, quantiles and samplers.

Covers the generalized Pareto distribution (GPD) used as the tail model and
the five parent families used in the simulation experiments (lognormal,
normal, GEV, GPD, exponential).  All GPD formulas switch to the exponential
limit for |xi| below ``SMALL_XI`` to avoid cancellation near xi = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import InfiniteMeanError

# below this the shape is treated as exactly zero (exponential limit)
SMALL_XI = 1e-8


@dataclass(frozen=True)
class GpdParams:
    """Shape ``xi`` and scale ``sigma`` of the two-parameter GPD."""

    xi: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def upper_endpoint(self) -> float:
        """Upper support endpoint: -sigma/xi for xi < 0, else +inf."""
        if self.xi < -SMALL_XI:
            return -self.sigma / self.xi
        return np.inf


def gpd_cdf(params: GpdParams, x):
    """GPD distribution function, clamped to [0, 1] outside the support."""
    x = np.asarray(x, dtype=float)
    xi, sigma = params.xi, params.sigma
    z = x / sigma
    if abs(xi) < SMALL_XI:
        out = -np.expm1(-np.clip(z, 0.0, None))
    else:
        arg = np.clip(1.0 + xi * z, 0.0, None)
        with np.errstate(divide="ignore"):
            out = -np.expm1(-np.log(arg) / xi)
    out = np.where(z < 0, 0.0, np.clip(out, 0.0, 1.0))
    return out if out.ndim else float(out)


def gpd_pdf(params: GpdParams, x):
    """GPD density; zero off the support."""
    x = np.asarray(x, dtype=float)
    xi, sigma = params.xi, params.sigma
    z = x / sigma
    if abs(xi) < SMALL_XI:
        out = np.exp(-z) / sigma
        out = np.where(z < 0, 0.0, out)
    else:
        arg = 1.0 + xi * z
        inside = (z >= 0) & (arg > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(
                inside,
                np.exp(-(1.0 + 1.0 / xi) * np.log(np.where(inside, arg, 1.0))) / sigma,
                0.0,
            )
    return out if out.ndim else float(out)


def gpd_quantile(params: GpdParams, q):
    """Inverse of :func:`gpd_cdf` on [0, 1)."""
    q = np.asarray(q, dtype=float)
    if np.any((q < 0) | (q >= 1)):
        raise ValueError("quantile level must lie in [0, 1)")
    xi, sigma = params.xi, params.sigma
    if abs(xi) < SMALL_XI:
        out = -sigma * np.log1p(-q)
    else:
        out = sigma / xi * np.expm1(-xi * np.log1p(-q))
    return out if out.ndim else float(out)


def gpd_mean(params: GpdParams) -> float:
    """Mean sigma/(1 - xi); finite only for xi < 1."""
    if params.xi >= 1:
        raise InfiniteMeanError(f"GPD mean is infinite for xi={params.xi} >= 1")
    return params.sigma / (1.0 - params.xi)


def gpd_mean_excess(params: GpdParams, v: float) -> float:
    """Mean excess (sigma + xi*v)/(1 - xi) of the GPD evaluated at v."""
    if params.xi >= 1:
        raise InfiniteMeanError(f"mean excess is infinite for xi={params.xi} >= 1")
    return (params.sigma + params.xi * v) / (1.0 - params.xi)


def gpd_sample(params: GpdParams, rng: np.random.Generator, n: int) -> np.ndarray:
    """Inverse-transform sample of size n; deterministic for a given rng state."""
    return gpd_quantile(params, rng.random(n))


PARENT_KINDS = ("lognormal", "normal", "gev", "gpd", "exponential")


@dataclass(frozen=True)
class ParentDistribution:
    """One of the five parent families used in the experiments.

    ``mu`` is ignored by the exponential, ``xi`` only used by GEV and GPD.
    """

    kind: str
    mu: float = 0.0
    sigma: float = 1.0
    xi: float = 0.0

    def __post_init__(self):
        if self.kind not in PARENT_KINDS:
            raise ValueError(f"unknown parent kind {self.kind!r}; one of {PARENT_KINDS}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def upper_endpoint(self) -> float:
        if self.kind == "gpd" and self.xi < -SMALL_XI:
            return self.mu - self.sigma / self.xi
        if self.kind == "gev" and self.xi < -SMALL_XI:
            return self.mu - self.sigma / self.xi
        return np.inf


def parent_cdf(dist: ParentDistribution, x):
    x = np.asarray(x, dtype=float)
    mu, sigma, xi = dist.mu, dist.sigma, dist.xi
    if dist.kind == "normal":
        out = ndtr((x - mu) / sigma)
    elif dist.kind == "lognormal":
        with np.errstate(divide="ignore"):
            out = np.where(x > 0, ndtr((np.log(np.clip(x, 1e-300, None)) - mu) / sigma), 0.0)
    elif dist.kind == "exponential":
        out = -np.expm1(-np.clip(x, 0.0, None) / sigma)
    elif dist.kind == "gpd":
        out = gpd_cdf(GpdParams(xi, sigma), x - mu)
    else:  # gev
        z = (x - mu) / sigma
        if abs(xi) < SMALL_XI:
            out = np.exp(-np.exp(-z))
        else:
            arg = 1.0 + xi * z
            if xi > 0:
                out = np.where(arg > 0, np.exp(-np.clip(arg, 1e-300, None) ** (-1.0 / xi)), 0.0)
            else:
                out = np.where(arg > 0, np.exp(-np.clip(arg, 1e-300, None) ** (-1.0 / xi)), 1.0)
    return out if np.ndim(out) else float(out)


def parent_quantile(dist: ParentDistribution, q):
    q = np.asarray(q, dtype=float)
    if np.any((q <= 0) | (q >= 1)):
        raise ValueError("quantile level must lie in (0, 1)")
    mu, sigma, xi = dist.mu, dist.sigma, dist.xi
    if dist.kind == "normal":
        out = mu + sigma * ndtri(q)
    elif dist.kind == "lognormal":
        out = np.exp(mu + sigma * ndtri(q))
    elif dist.kind == "exponential":
        out = -sigma * np.log1p(-q)
    elif dist.kind == "gpd":
        out = mu + gpd_quantile(GpdParams(xi, sigma), q)
    else:  # gev
        if abs(xi) < SMALL_XI:
            out = mu - sigma * np.log(-np.log(q))
        else:
            out = mu + sigma / xi * np.expm1(-xi * np.log(-np.log(q)))
    return out if np.ndim(out) else float(out)


def parent_sample(dist: ParentDistribution, rng: np.random.Generator, n: int) -> np.ndarray:
    """Inverse-transform sample; uniforms are nudged off {0, 1} for safety."""
    u = rng.random(n)
    u = np.clip(u, 1e-16, 1.0 - 1e-16)
    return parent_quantile(dist, u)
