"""Critical values of W2, A2 and AU2 under a fitted GPD (case 3).

Contains the embedded reference grid of asymptotic critical values, Monte
Carlo regeneration of such tables, interpolation to arbitrary (xi, p) and
p-value computation (table-based and parametric bootstrap).
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .gpd_fit import fit_mle  # noqa: F401  (re-exported for callers)

STAT_NAMES = ("W2", "A2", "AU2")

XI_GRID = (-0.5, -0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.5, 0.9)
P_GRID = (0.950, 0.900, 0.850, 0.800, 0.750, 0.500, 0.250, 0.100, 0.050, 0.025, 0.010, 0.005, 0.001)

_W2 = [
    [0.027, 0.032, 0.037, 0.041, 0.045, 0.068, 0.104, 0.155, 0.194, 0.236, 0.293, 0.336, 0.439],
    [0.026, 0.031, 0.036, 0.040, 0.044, 0.065, 0.100, 0.147, 0.185, 0.223, 0.276, 0.317, 0.414],
    [0.025, 0.030, 0.035, 0.038, 0.042, 0.063, 0.095, 0.140, 0.175, 0.212, 0.261, 0.300, 0.392],
    [0.025, 0.030, 0.034, 0.037, 0.041, 0.060, 0.091, 0.133, 0.166, 0.200, 0.246, 0.282, 0.368],
    [0.024, 0.029, 0.033, 0.036, 0.040, 0.058, 0.087, 0.127, 0.157, 0.189, 0.233, 0.266, 0.348],
    [0.024, 0.028, 0.032, 0.035, 0.039, 0.056, 0.084, 0.121, 0.150, 0.180, 0.221, 0.253, 0.327],
    [0.023, 0.027, 0.031, 0.034, 0.037, 0.054, 0.081, 0.116, 0.143, 0.171, 0.209, 0.239, 0.309],
    [0.023, 0.027, 0.030, 0.034, 0.037, 0.053, 0.078, 0.111, 0.137, 0.164, 0.200, 0.228, 0.294],
    [0.022, 0.026, 0.029, 0.032, 0.034, 0.049, 0.072, 0.101, 0.124, 0.148, 0.179, 0.204, 0.263],
    [0.021, 0.024, 0.027, 0.030, 0.033, 0.046, 0.067, 0.094, 0.115, 0.136, 0.165, 0.187, 0.240],
]

_A2 = [
    [0.203, 0.239, 0.269, 0.296, 0.321, 0.459, 0.674, 0.965, 1.195, 1.435, 1.765, 2.018, 2.621],
    [0.198, 0.234, 0.262, 0.288, 0.313, 0.445, 0.650, 0.926, 1.146, 1.373, 1.686, 1.927, 2.502],
    [0.194, 0.228, 0.255, 0.280, 0.304, 0.431, 0.627, 0.890, 1.099, 1.315, 1.610, 1.839, 2.388],
    [0.190, 0.223, 0.249, 0.273, 0.297, 0.418, 0.606, 0.855, 1.052, 1.256, 1.537, 1.752, 2.275],
    [0.186, 0.218, 0.244, 0.267, 0.289, 0.406, 0.584, 0.822, 1.010, 1.204, 1.468, 1.671, 2.164],
    [0.183, 0.214, 0.238, 0.261, 0.282, 0.395, 0.565, 0.791, 0.970, 1.153, 1.406, 1.602, 2.062],
    [0.180, 0.210, 0.234, 0.256, 0.276, 0.385, 0.549, 0.765, 0.935, 1.109, 1.348, 1.533, 1.975],
    [0.177, 0.206, 0.230, 0.251, 0.271, 0.376, 0.534, 0.741, 0.903, 1.070, 1.298, 1.474, 1.889],
    [0.171, 0.199, 0.220, 0.240, 0.259, 0.356, 0.499, 0.686, 0.831, 0.980, 1.183, 1.339, 1.715],
    [0.166, 0.192, 0.213, 0.232, 0.249, 0.339, 0.472, 0.641, 0.772, 0.905, 1.087, 1.229, 1.568],
]

_AU2 = [
    [0.085, 0.100, 0.112, 0.123, 0.134, 0.191, 0.277, 0.389, 0.476, 0.565, 0.686, 0.778, 0.995],
    [0.082, 0.097, 0.109, 0.119, 0.130, 0.184, 0.265, 0.371, 0.453, 0.536, 0.650, 0.737, 0.945],
    [0.080, 0.094, 0.106, 0.116, 0.126, 0.177, 0.254, 0.355, 0.432, 0.511, 0.618, 0.701, 0.897],
    [0.078, 0.092, 0.103, 0.113, 0.122, 0.171, 0.245, 0.340, 0.413, 0.487, 0.588, 0.666, 0.851],
    [0.077, 0.090, 0.100, 0.110, 0.119, 0.166, 0.236, 0.326, 0.396, 0.467, 0.563, 0.636, 0.811],
    [0.075, 0.088, 0.098, 0.107, 0.116, 0.161, 0.229, 0.315, 0.381, 0.449, 0.540, 0.611, 0.777],
    [0.074, 0.087, 0.097, 0.105, 0.114, 0.158, 0.223, 0.306, 0.369, 0.434, 0.521, 0.588, 0.746],
    [0.073, 0.085, 0.095, 0.104, 0.112, 0.155, 0.218, 0.298, 0.359, 0.421, 0.505, 0.569, 0.720],
    [0.071, 0.083, 0.092, 0.101, 0.108, 0.149, 0.208, 0.283, 0.340, 0.398, 0.477, 0.536, 0.678],
    [0.071, 0.082, 0.091, 0.099, 0.107, 0.146, 0.204, 0.277, 0.333, 0.389, 0.465, 0.523, 0.661],
]


@dataclass(frozen=True)
class PValue:
    """A p-value that may be censored by the edge of the tabulated grid."""

    value: float
    censored: str = "none"  # "none", "high" (> value) or "low" (< value)

    def __str__(self) -> str:
        if self.censored == "high":
            return f"> {self.value:g}"
        if self.censored == "low":
            return f"< {self.value:g}"
        return f"{self.value:g}"


@dataclass(frozen=True)
class McConfig:
    replications: int = 200_000
    sample_size: int = 1000
    seed: int = 0
    chunk_size: int = 10_000

    def __post_init__(self):
        if self.replications < 10_000:
            raise ValueError("replications must be at least 10000")
        if self.sample_size < 25:
            raise ValueError("sample_size must be at least 25")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")


@dataclass(frozen=True)
class CriticalValueTable:
    xi_grid: tuple
    p_grid: tuple  # descending significance levels
    values: dict  # stat name -> ndarray of shape (len(xi_grid), len(p_grid))
    provenance: dict = field(default_factory=lambda: {"source": "embedded"})

    def lookup(self, stat: str, xi: float, p: float) -> float:
        """Exact grid lookup; both xi and p must be grid points."""
        i = self.xi_grid.index(xi)
        j = self.p_grid.index(p)
        return float(self.values[stat][i, j])


def builtin_table() -> CriticalValueTable:
    """The embedded asymptotic critical-value grid."""
    return CriticalValueTable(
        xi_grid=XI_GRID,
        p_grid=P_GRID,
        values={
            "W2": np.array(_W2),
            "A2": np.array(_A2),
            "AU2": np.array(_AU2),
        },
        provenance={"source": "embedded"},
    )


def simulate_null_statistics(xi: float, config: McConfig) -> np.ndarray:
    """Replications x 3 array of (W2, A2, AU2) under the fitted-GPD null.

    Work is split into fixed-size seeded chunks; for a given (seed,
    chunk_size) the result is bit-identical regardless of scheduling.
    """
    reps = config.replications
    n = config.sample_size
    n_chunks = (reps + config.chunk_size - 1) // config.chunk_size
    # derive one independent stream per (xi, chunk) pair
    xi_key = int(np.float64(xi).view(np.uint64))
    seeds = np.random.SeedSequence(entropy=config.seed, spawn_key=(xi_key,)).spawn(n_chunks)
    parts = []
    done = 0
    for c in range(n_chunks):
        m = min(config.chunk_size, reps - done)
        u = np.random.default_rng(seeds[c]).random((m, n))
        u = np.clip(u, 1e-16, 1.0 - 1e-16)
        stats, _conv = _kernels.null_stats_kernel(u, float(xi))
        parts.append(stats)
        done += m
    return np.concatenate(parts, axis=0)


def generate_table(config: McConfig, xi_grid=XI_GRID, p_grid=P_GRID) -> CriticalValueTable:
    """Regenerate a critical-value table by Monte Carlo simulation."""
    xi_grid = tuple(float(x) for x in xi_grid)
    p_grid = tuple(float(p) for p in p_grid)
    if any(np.diff(xi_grid) <= 0):
        raise ValueError("xi_grid must be strictly ascending")
    if any(np.diff(p_grid) >= 0):
        raise ValueError("p_grid must be strictly descending")
    values = {s: np.empty((len(xi_grid), len(p_grid))) for s in STAT_NAMES}
    q_levels = 1.0 - np.asarray(p_grid)
    for i, xi in enumerate(xi_grid):
        stats = simulate_null_statistics(xi, config)
        for s_idx, s in enumerate(STAT_NAMES):
            col = np.sort(stats[:, s_idx])
            values[s][i] = np.quantile(col, q_levels)
    return CriticalValueTable(
        xi_grid=xi_grid,
        p_grid=p_grid,
        values=values,
        provenance={
            "source": "generated",
            "replications": config.replications,
            "sample_size": config.sample_size,
            "seed": config.seed,
            "chunk_size": config.chunk_size,
        },
    )


def _xi_clamped(table: CriticalValueTable, xi: float) -> float:
    lo, hi = table.xi_grid[0], table.xi_grid[-1]
    if xi < lo:
        return lo
    if xi > hi:
        warnings.warn(
            f"shape estimate {xi:.3f} above tabulated maximum {hi}; clamping",
            stacklevel=3,
        )
        return hi
    return xi


def _row_at_xi(table: CriticalValueTable, stat: str, xi: float) -> np.ndarray:
    """Critical values over the whole p grid, linearly interpolated in xi."""
    if stat not in table.values:
        raise KeyError(f"no critical values for statistic {stat!r}")
    xi = _xi_clamped(table, xi)
    grid = np.asarray(table.xi_grid)
    vals = table.values[stat]
    i = int(np.searchsorted(grid, xi, side="right")) - 1
    if i >= len(grid) - 1:
        return vals[-1].astype(float)
    if i < 0:
        return vals[0].astype(float)
    w = (xi - grid[i]) / (grid[i + 1] - grid[i])
    return (1.0 - w) * vals[i] + w * vals[i + 1]


def critical_value(table: CriticalValueTable, stat: str, xi: float, p: float) -> float:
    """Interpolated critical value: linear in xi, linear in ln p."""
    p_grid = np.asarray(table.p_grid)
    if p < p_grid.min() or p > p_grid.max():
        raise ValueError(f"significance level {p} outside tabulated range "
                         f"[{p_grid.min()}, {p_grid.max()}]")
    row = _row_at_xi(table, stat, xi)
    # p grid is descending; np.interp needs ascending x
    lp = np.log(p_grid)[::-1]
    rv = row[::-1]
    return float(np.interp(np.log(p), lp, rv))


def p_value(table: CriticalValueTable, stat: str, xi: float, observed: float) -> PValue:
    """Invert the interpolated critical-value curve at fixed xi.

    Censored when the observed statistic falls outside the tabulated range.
    """
    if observed < 0:
        raise ValueError("observed statistic must be nonnegative")
    row = _row_at_xi(table, stat, xi)
    p_grid = np.asarray(table.p_grid)
    if observed < row[0]:
        return PValue(float(p_grid[0]), "high")
    if observed > row[-1]:
        return PValue(float(p_grid[-1]), "low")
    # row increases as p decreases; interpolate ln p linearly in the statistic
    lp = float(np.interp(observed, row, np.log(p_grid)))
    return PValue(float(np.exp(lp)), "none")


def mc_p_value(stat: str, xi_hat: float, n: int, observed: float,
               reps: int = 10_000, seed: int = 0) -> float:
    """Parametric-bootstrap p-value under GPD(xi_hat, 1) with refitting."""
    if reps < 1000:
        raise ValueError("reps must be at least 1000")
    if stat not in STAT_NAMES:
        raise KeyError(f"no bootstrap for statistic {stat!r}")
    cfg = McConfig(replications=max(reps, 10_000), sample_size=max(n, 25), seed=seed)
    # honor the requested rep count exactly even below the table-scale minimum
    n_chunks = (reps + cfg.chunk_size - 1) // cfg.chunk_size
    xi_key = int(np.float64(xi_hat).view(np.uint64))
    seeds = np.random.SeedSequence(entropy=seed, spawn_key=(xi_key,)).spawn(n_chunks)
    col = STAT_NAMES.index(stat)
    exceed = 0
    done = 0
    for c in range(n_chunks):
        m = min(cfg.chunk_size, reps - done)
        u = np.random.default_rng(seeds[c]).random((m, n))
        u = np.clip(u, 1e-16, 1.0 - 1e-16)
        stats, _ = _kernels.null_stats_kernel(u, float(xi_hat))
        exceed += int(np.count_nonzero(stats[:, col] > observed))
        done += m
    return exceed / reps


def save_table(table: CriticalValueTable, csv_path, json_path=None) -> None:
    """CSV with header stat,xi,p,value plus a JSON provenance sidecar."""
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["stat", "xi", "p", "value"])
        for s in STAT_NAMES:
            if s not in table.values:
                continue
            for i, xi in enumerate(table.xi_grid):
                for j, p in enumerate(table.p_grid):
                    w.writerow([s, repr(xi), repr(p), repr(float(table.values[s][i, j]))])
    if json_path is not None:
        with open(json_path, "w") as fh:
            json.dump(table.provenance, fh, indent=2, sort_keys=True)
            fh.write("\n")


def load_table(csv_path, provenance=None) -> CriticalValueTable:
    rows = {}
    with open(csv_path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows[(rec["stat"], float(rec["xi"]), float(rec["p"]))] = float(rec["value"])
    xi_grid = tuple(sorted({k[1] for k in rows}))
    p_grid = tuple(sorted({k[2] for k in rows}, reverse=True))
    stats = sorted({k[0] for k in rows})
    values = {
        s: np.array([[rows[(s, xi, p)] for p in p_grid] for xi in xi_grid]) for s in stats
    }
    return CriticalValueTable(xi_grid, p_grid, values, provenance or {"source": "file"})
