"""Experiments package: regimes, estimators, growth curves and the acceptance suite."""

from .fitting import SlopeFit, fit_slope, verdict
from .growth import (ContrastReport, EquivalenceStats, GrowthReport, GrowthRow,
                     endpoint_contrast, equivalence_ratio, growth_curve, max_feasible_N)
from .projection import Estimate, estimate_projection_norm_lb, exhaustive_haar_search
from .regimes import Prediction, classify_regime, predicted_exponent, reference_upper_bound
from .selftest import SelftestOptions, run_selftest
from .settings import ExperimentConfig, Resources, build_resources

__all__ = [
    'SlopeFit', 'fit_slope', 'verdict',
    'GrowthRow', 'GrowthReport', 'ContrastReport', 'EquivalenceStats', 'growth_curve',
    'endpoint_contrast', 'equivalence_ratio', 'max_feasible_N',
    'Estimate', 'estimate_projection_norm_lb', 'exhaustive_haar_search',
    'Prediction', 'classify_regime', 'predicted_exponent', 'reference_upper_bound',
    'SelftestOptions', 'run_selftest',
    'ExperimentConfig', 'Resources', 'build_resources',
]
