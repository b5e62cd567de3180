"""
vecmkit: unit-root tests, VAR lag selection, Johansen cointegration,
VECM estimation, residual diagnostics and impulse-response analysis for
small annual macro panels.
"""

from .dataset import Dataset, Series, describe, first_difference, load_csv, log_transform, to_csv
from .diagnostics import arch_lm, diagnose, jarque_bera, portmanteau
from .dynamics import bootstrap_bands, fevd, fevd_companion, irf, vecm_to_var_levels
from .errors import VecmkitError
from .johansen import johansen_test
from .linreg import multi_ols, ols
from .pipeline import PipelineConfig, StudyReport, load_config, parse_config, run_pipeline
from .report import emit_report
from .simulate import DgpSpec, generate
from .unitroot import adf_test, integration_order, pp_test
from .varmodel import fit_var, granger_test, select_lag_order
from .vecm import (
    fit_vecm,
    normalize_long_run,
    restrict_to_subset,
    weak_exogeneity_test,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset", "Series", "describe", "first_difference", "load_csv", "log_transform", "to_csv",
    "arch_lm", "diagnose", "jarque_bera", "portmanteau",
    "bootstrap_bands", "fevd", "fevd_companion", "irf", "vecm_to_var_levels",
    "VecmkitError", "johansen_test", "multi_ols", "ols",
    "PipelineConfig", "StudyReport", "load_config", "parse_config", "run_pipeline", "emit_report",
    "DgpSpec", "generate", "adf_test", "integration_order", "pp_test",
    "fit_var", "granger_test", "select_lag_order",
    "fit_vecm", "normalize_long_run", "restrict_to_subset", "weak_exogeneity_test",
]
