"""tailsep: body/tail separation with a GPD tail model and risk measures."""

from .critical_values import (
    CriticalValueTable,
    McConfig,
    PValue,
    builtin_table,
    critical_value,
    generate_table,
    load_table,
    mc_p_value,
    p_value,
    save_table,
)
from .distributions import (
    GpdParams,
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
from .errors import (
    BelowTailError,
    DegenerateDataError,
    DivergentStatisticError,
    InfiniteMeanError,
    InsufficientDataError,
)
from .gpd_fit import FitResult, fit_mle, neg_log_likelihood
from .risk import RiskReport, cvar, delta_s, risk_report, to_losses, var
from .statistics import (
    anderson_darling,
    au2,
    cramer_von_mises,
    edf,
    lower_tail_stat,
    risk_function,
    upper_tail_stat,
)
from .tail_detect import (
    McExperimentResult,
    ScanOptions,
    TailModel,
    TailScanRow,
    detect,
    ideal_case_sample,
    mc_experiment,
    scan,
)

__version__ = "0.1.0"

__all__ = [
    "BelowTailError",
    "CriticalValueTable",
    "DegenerateDataError",
    "DivergentStatisticError",
    "FitResult",
    "GpdParams",
    "InfiniteMeanError",
    "InsufficientDataError",
    "McConfig",
    "McExperimentResult",
    "ParentDistribution",
    "PValue",
    "RiskReport",
    "ScanOptions",
    "TailModel",
    "TailScanRow",
    "anderson_darling",
    "au2",
    "builtin_table",
    "cramer_von_mises",
    "critical_value",
    "cvar",
    "delta_s",
    "detect",
    "edf",
    "fit_mle",
    "generate_table",
    "gpd_cdf",
    "gpd_mean_excess",
    "gpd_pdf",
    "gpd_quantile",
    "gpd_sample",
    "ideal_case_sample",
    "load_table",
    "lower_tail_stat",
    "mc_experiment",
    "mc_p_value",
    "neg_log_likelihood",
    "p_value",
    "parent_cdf",
    "parent_quantile",
    "parent_sample",
    "risk_function",
    "risk_report",
    "save_table",
    "scan",
    "to_losses",
    "upper_tail_stat",
    "var",
]
