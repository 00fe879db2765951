"""Adaptive-to-model lack-of-fit test for parametric single-index regression."""

__version__ = "0.1.0"

from .core import Dataset, RngSpec, load_dataset, standardize_columns, unstandardize
from .errors import (
    AdaptestError,
    InputError,
    NumericalError,
    ParseError,
    TransformSingularError,
)
from .families import FAMILIES, SingleIndexModel, get_family
from .fit import FitResult, fit_model
from .sdr import DeeMatrix, SdrEstimate, dee_matrix, mrer, sdr_estimate
from .smooth import KernelSpec, bandwidth_rule, nw_estimate, sigma2_estimate
from .nulldist import NullTable, default_table, p_value, simulate_null_paths, simulate_null_series
from .transform import TestOptions, TestReport, direction_grid, wn_statistic
from .competitors import ZhengReport, zheng_test
from .sim import ScenarioSpec, StudyResult, generate, results_table, run_study

__all__ = [
    "__version__",
    "AdaptestError", "InputError", "NumericalError", "ParseError", "TransformSingularError",
    "Dataset", "RngSpec", "load_dataset", "standardize_columns", "unstandardize",
    "FAMILIES", "SingleIndexModel", "get_family",
    "FitResult", "fit_model",
    "DeeMatrix", "SdrEstimate", "dee_matrix", "mrer", "sdr_estimate",
    "KernelSpec", "bandwidth_rule", "nw_estimate", "sigma2_estimate",
    "NullTable", "default_table", "p_value", "simulate_null_paths", "simulate_null_series",
    "TestOptions", "TestReport", "direction_grid", "wn_statistic",
    "ZhengReport", "zheng_test",
    "ScenarioSpec", "StudyResult", "generate", "results_table", "run_study",
]
