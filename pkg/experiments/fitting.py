"""
Fitting Module
Least-squares slope fits of log-growth data and the verdict against a prediction.
"""

import logging
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from analysis.errors import FittingError
from utils.config import DEFAULT_R2_MIN, DEFAULT_SLOPE_TOL

logger = logging.getLogger(__name__)

CONSISTENT = 'consistent'
INCONSISTENT = 'inconsistent'
INCONCLUSIVE = 'inconclusive'

CONFIDENCE = 0.95


class SlopeFit(NamedTuple):
    slope: float
    intercept: float
    r2: float
    stderr: float
    ci_low: float
    ci_high: float
    n: int


def fit_slope(points: Sequence[Tuple[float, float]]) -> SlopeFit:
    """
    Ordinary least-squares line through (x, y) points.

    r2 is 1 - SS_res / SS_tot, taken as 1 for data with no spread in y. The
    confidence interval is the two-sided 95% Student-t interval on the slope
    (degenerate to the slope itself for two points).

    Raises:
        FittingError: On fewer than 2 points, non-finite values or a single x
    """
    data = np.asarray(points, dtype=float)
    if data.ndim != 2 or data.shape[0] < 2 or data.shape[1] != 2:
        raise FittingError(f"need at least 2 (x, y) points, got {len(points)}")
    if not np.all(np.isfinite(data)):
        raise FittingError("points must be finite")
    x, y = data[:, 0], data[:, 1]
    if np.ptp(x) == 0:
        raise FittingError("all points share the same x")

    result = stats.linregress(x, y)
    slope, intercept = float(result.slope), float(result.intercept)
    residual = y - (slope * x + intercept)
    ss_res = float(np.sum(residual ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0

    n = x.size
    if n > 2:
        stderr = float(result.stderr)
        half = float(stats.t.ppf(0.5 + CONFIDENCE / 2, n - 2)) * stderr
    else:
        stderr, half = 0.0, 0.0
    return SlopeFit(slope, intercept, r2, stderr, slope - half, slope + half, n)


def verdict(fit: SlopeFit, predicted: Optional[float], tol: float = DEFAULT_SLOPE_TOL,
            r2_min: float = DEFAULT_R2_MIN) -> str:
    """
    Compare a fitted slope with a predicted exponent.

    consistent: |slope - predicted| <= tol and (r2 >= r2_min or predicted == 0).
    inconclusive: no polynomial prediction, or the confidence interval covers it.
    inconsistent: otherwise.
    """
    if predicted is None:
        return INCONCLUSIVE
    flat = predicted == 0
    if abs(fit.slope - predicted) <= tol and (fit.r2 >= r2_min or flat):
        return CONSISTENT
    if fit.ci_low <= predicted <= fit.ci_high:
        return INCONCLUSIVE
    logger.info("slope %.4f vs predicted %.4f (r2=%.3f) is inconsistent",
                fit.slope, predicted, fit.r2)
    return INCONSISTENT
