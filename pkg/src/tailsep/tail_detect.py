"""Threshold detection: scan candidate tail sizes, pick the AU2 minimum.

Also houses the ideal-case construction (deterministic quantile grids) and
the Monte Carlo experiment that averages the scan over many samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .critical_values import CriticalValueTable, PValue, mc_p_value, p_value
from .distributions import GpdParams, ParentDistribution, parent_quantile, parent_sample
from .errors import DegenerateDataError, InsufficientDataError


@dataclass(frozen=True)
class ScanOptions:
    k_min_warn: int = 25
    parallel: bool = False  # accepted for API stability; execution is serial
    p_value_mode: str = "table"  # "table" or "mc"
    mc_reps: int = 10_000
    mc_seed: int = 0
    # re-anchor the warm-started profile search with a cold start every this
    # many k during the scan
    cold_restart_every: int = 100

    def __post_init__(self):
        if self.k_min_warn < 2:
            raise ValueError("k_min_warn must be at least 2")
        if self.p_value_mode not in ("table", "mc"):
            raise ValueError("p_value_mode must be 'table' or 'mc'")


@dataclass(frozen=True)
class TailScanRow:
    k: int
    xi_k: float
    sigma_k: float
    au2: float
    w2: float
    a2: float
    fit_converged: bool


@dataclass(frozen=True)
class TailModel:
    u: float
    k_star: int
    n: int
    params: GpdParams
    gof: dict  # stat name -> {"value": float, "p_value": PValue}
    warnings: list = field(default_factory=list)

    @property
    def tail_fraction(self) -> float:
        return self.k_star / self.n


def _checked_sample(sample) -> np.ndarray:
    x = np.asarray(sample, dtype=float)
    if x.ndim != 1 or x.size < 3:
        raise InsufficientDataError(f"need at least 3 observations, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite values")
    if np.all(x == x[0]):
        raise DegenerateDataError("constant sample; no tail to detect")
    return x


def scan(sample, options: ScanOptions = ScanOptions()) -> list[TailScanRow]:
    """Fit a GPD and compute AU2/W2/A2 for every candidate tail size k=2..n."""
    x = _checked_sample(sample)
    x_desc = np.sort(x)[::-1].copy()
    xi, sig, au, w2, a2, conv = _kernels.scan_kernel(x_desc, options.cold_restart_every)
    return [
        TailScanRow(
            k=k,
            xi_k=float(xi[k - 2]),
            sigma_k=float(sig[k - 2]),
            au2=float(au[k - 2]),
            w2=float(w2[k - 2]),
            a2=float(a2[k - 2]),
            fit_converged=bool(conv[k - 2]),
        )
        for k in range(2, x.size + 1)
    ]


def detect(sample, table: CriticalValueTable,
           options: ScanOptions = ScanOptions()) -> TailModel:
    """Run the scan and select k* at the minimum of AU2 (ties: smallest k)."""
    x = _checked_sample(sample)
    x_desc = np.sort(x)[::-1].copy()
    rows = scan(x_desc, options)
    au = np.array([r.au2 for r in rows])
    k_star = int(np.argmin(au)) + 2
    best = rows[k_star - 2]
    u = float(x_desc[k_star - 1])
    params = GpdParams(best.xi_k, best.sigma_k)

    gof = {}
    for stat, value in (("W2", best.w2), ("A2", best.a2), ("AU2", best.au2)):
        if options.p_value_mode == "table":
            pv = p_value(table, stat, best.xi_k, value)
        else:
            pv = PValue(
                mc_p_value(stat, best.xi_k, k_star, value,
                           reps=options.mc_reps, seed=options.mc_seed)
            )
        gof[stat] = {"value": value, "p_value": pv}

    warns = []
    if k_star < options.k_min_warn:
        warns.append(
            f"selected tail size k*={k_star} is below {options.k_min_warn}; "
            "statistics converge poorly for such small tails"
        )
    if not best.fit_converged:
        warns.append(
            "the GPD fit at k* did not converge; parameters are moment-based "
            "fallback estimates"
        )
    return TailModel(u=u, k_star=k_star, n=x.size, params=params, gof=gof, warnings=warns)


def ideal_case_sample(parent: ParentDistribution, n: int) -> np.ndarray:
    """Deterministic quantile grid x_k = H^-1(k/n), ascending.

    The k=n point is the upper support endpoint when finite, otherwise the
    (n - 0.5)/n quantile stands in for the undefined H^-1(1).
    """
    if n < 2:
        raise InsufficientDataError(f"need n >= 2, got {n}")
    ks = np.arange(1, n, dtype=float)
    x = np.empty(n)
    x[:-1] = parent_quantile(parent, ks / n)
    top = parent.upper_endpoint
    if np.isfinite(top):
        x[-1] = top
    else:
        x[-1] = parent_quantile(parent, (n - 0.5) / n)
    return x


@dataclass(frozen=True)
class McExperimentResult:
    k: np.ndarray  # candidate tail sizes 2..n
    mean_au2: np.ndarray
    band_lo: np.ndarray  # central ~67% band of the AU2 realizations
    band_hi: np.ndarray
    k_star: np.ndarray  # per-replication argmin
    xi_star: np.ndarray
    tail_fraction: np.ndarray
    mean_curve_k_star: int  # argmin of the mean curve


def mc_experiment(parent: ParentDistribution, n: int, reps: int,
                  seed: int = 0) -> McExperimentResult:
    """Average the scan over many seeded samples from a parent distribution."""
    if reps < 1:
        raise ValueError("reps must be positive")
    seeds = np.random.SeedSequence(seed).spawn(reps)
    au_all = np.empty((reps, n - 1))
    k_star = np.empty(reps, dtype=int)
    xi_star = np.empty(reps)
    for r in range(reps):
        rng = np.random.default_rng(seeds[r])
        x = parent_sample(parent, rng, n)
        x_desc = np.sort(x)[::-1].copy()
        xi, _sig, au, _w2, _a2, _conv = _kernels.scan_kernel(x_desc, 100)
        au_all[r] = au
        idx = int(np.argmin(au))
        k_star[r] = idx + 2
        xi_star[r] = xi[idx]
    lo, hi = np.quantile(au_all, [0.5 - 0.6827 / 2, 0.5 + 0.6827 / 2], axis=0)
    mean = au_all.mean(axis=0)
    return McExperimentResult(
        k=np.arange(2, n + 1),
        mean_au2=mean,
        band_lo=lo,
        band_hi=hi,
        k_star=k_star,
        xi_star=xi_star,
        tail_fraction=k_star / n,
        mean_curve_k_star=int(np.argmin(mean)) + 2,
    )
