"""Distribution fitting, two-sample tests, regression and shuffle nulls."""
from .ks import KSResult, ks_two_sample
from .nulls import Neighborhood, NullResult, permutation_null
from .powerlaw import (LognormalFit, LRTResult, PowerLawFit, ccdf, fit_lognormal, fit_power_law,
                       fit_report, hill_alpha, lognormal_logpmf, lrt_vs_lognormal, power_law_ccdf_line,
                       powerlaw_logpmf, powerlaw_sf, vuong)
from .regression import RegressionResult, ols, pearson, zscore

__all__ = [
    "KSResult", "ks_two_sample", "Neighborhood", "NullResult", "permutation_null",
    "LognormalFit", "LRTResult", "PowerLawFit", "ccdf", "fit_lognormal", "fit_power_law",
    "fit_report", "hill_alpha", "lognormal_logpmf", "lrt_vs_lognormal", "power_law_ccdf_line",
    "powerlaw_logpmf", "powerlaw_sf", "vuong", "RegressionResult", "ols", "pearson", "zscore",
]
