"""Adaptive L_q-norm change-point testing and estimation for panels."""

from .adaptive import AdaptiveResult, adaptive_decision, combine_p_values
from .backend import active_backend, set_backend
from .datamodel import (
    DataMatrix,
    Interval,
    Segmentation,
    load_csv_matrix,
    validate_even_order,
    validate_matrix,
    validate_qset,
)
from .estimate import (
    BreakRecord,
    WbsConfig,
    WbsResult,
    draw_intervals,
    single_cp_estimate,
    wbs_adaptive,
    wbs_detect,
)
from .evalmetrics import adjusted_rand_index, count_mse
from .nulldist import (
    NullTable,
    load_null_table,
    p_value,
    save_null_table,
    simulate_null_samples,
    table_quantile,
    wbs_threshold,
)
from .scenarios import RunReport, run_scenario, scenario_names
from .sntest import Preprocessing, SnProfile, scan_statistic, self_normalizer, sn_statistic
from .ustat import normalized_t_stat, u_profile, u_stat, u_stat_naive

__all__ = [
    "AdaptiveResult",
    "BreakRecord",
    "DataMatrix",
    "Interval",
    "NullTable",
    "Preprocessing",
    "RunReport",
    "Segmentation",
    "SnProfile",
    "WbsConfig",
    "WbsResult",
    "active_backend",
    "adaptive_decision",
    "adjusted_rand_index",
    "combine_p_values",
    "count_mse",
    "draw_intervals",
    "load_csv_matrix",
    "load_null_table",
    "normalized_t_stat",
    "p_value",
    "run_scenario",
    "save_null_table",
    "scan_statistic",
    "scenario_names",
    "self_normalizer",
    "set_backend",
    "simulate_null_samples",
    "single_cp_estimate",
    "sn_statistic",
    "table_quantile",
    "u_profile",
    "u_stat",
    "u_stat_naive",
    "validate_even_order",
    "validate_matrix",
    "validate_qset",
    "wbs_adaptive",
    "wbs_detect",
    "wbs_threshold",
]

__version__ = "0.1.0"
