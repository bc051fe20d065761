"""
Regimes Module
Classifies (p, q, s) into the regions where Haar projections behave differently
and gives the growth exponent predicted for each region.
"""

import math
from typing import NamedTuple, Optional

from analysis.errors import ConfigurationError

UNCONDITIONAL = 'unconditional'
POLYNOMIAL_P_LT_Q = 'polynomial-p<q'
POLYNOMIAL_Q_LT_P = 'polynomial-q<p'
ENDPOINT = 'endpoint'
INFINITE = 'infinite'

REGIMES = (UNCONDITIONAL, POLYNOMIAL_P_LT_Q, POLYNOMIAL_Q_LT_P, ENDPOINT, INFINITE)

LOG_REGIME_FLAG = 'log_regime'
INFINITE_FLAG = 'infinite'

BOUNDARY_TOL = 1e-12


class Prediction(NamedTuple):
    """
    Predicted growth of the worst projection norm in Lambda = 2^N.

    exponent is the polynomial exponent (0 in the unconditional region) or None
    when the region has no polynomial law. At the endpoint, lower_log_rate and
    upper_log_rate are the powers of log Lambda bounding the growth.
    """

    regime: str
    exponent: Optional[float]
    flag: Optional[str] = None
    lower_log_rate: Optional[float] = None
    upper_log_rate: Optional[float] = None


def _check(p: float, q: float, s: float):
    for key, value in (('p', p), ('q', q)):
        if not (1 < value < math.inf):
            raise ConfigurationError(key, f"need 1 < {key} < inf, got {value}")
    if not math.isfinite(s):
        raise ConfigurationError('s', f"must be finite, got {s}")


def classify_regime(p: float, q: float, s: float, tol: float = BOUNDARY_TOL) -> str:
    """
    Region of (p, q, s).

    Raises:
        ConfigurationError: Unless 1 < p, q < inf and s is finite
    """
    _check(p, q, s)
    p_dual = p / (p - 1)
    q_dual = q / (q - 1)
    if s >= 1 / p - tol or s <= -1 / p_dual + tol:
        return INFINITE
    if max(-1 / p_dual, -1 / q_dual) + tol < s < min(1 / p, 1 / q) - tol:
        return UNCONDITIONAL
    if abs(s - 1 / q) <= tol or abs(s + 1 / q_dual) <= tol:
        return ENDPOINT
    if s > 1 / q:
        return POLYNOMIAL_P_LT_Q
    return POLYNOMIAL_Q_LT_P


def predicted_exponent(p: float, q: float, s: float) -> Prediction:
    """
    Growth exponent of the Haar projection norms in Lambda.

    s - 1/q for 1/q < s < 1/p, -1/q' - s for -1/p' < s < -1/q', 0 in the
    unconditional region; flagged at the endpoints and outside the range where
    Haar functions belong to F^s_{p,q}.
    """
    regime = classify_regime(p, q, s)
    q_dual = q / (q - 1)
    if regime == UNCONDITIONAL:
        return Prediction(regime, 0.0)
    if regime == POLYNOMIAL_P_LT_Q:
        return Prediction(regime, s - 1 / q)
    if regime == POLYNOMIAL_Q_LT_P:
        return Prediction(regime, -1 / q_dual - s)
    if regime == ENDPOINT:
        lower = 1 / q if abs(s - 1 / q) <= BOUNDARY_TOL else 1 - 1 / q
        return Prediction(regime, None, LOG_REGIME_FLAG, lower, 1.0)
    return Prediction(regime, None, INFINITE_FLAG)


def reference_upper_bound(p: float, q: float, s: float, N: int,
                          z: Optional[float] = None) -> float:
    """
    Reference upper envelope for the projection norms at Lambda = 2^N.

    2^{N * exponent} in the polynomial regions, 1 in the unconditional region,
    N^{1/q'} Z^{1/q} at s = -1/q' and its dual N^{1/q} Z^{1/q'} at s = 1/q,
    where Z is the density count (N when not given). Constants are omitted.
    """
    if N < 1:
        raise ConfigurationError('N', f"must be >= 1, got {N}")
    prediction = predicted_exponent(p, q, s)
    if prediction.regime == INFINITE:
        return math.inf
    if prediction.regime == ENDPOINT:
        z = float(N) if z is None else float(z)
        q_dual = q / (q - 1)
        if abs(s - 1 / q) <= BOUNDARY_TOL:
            return N ** (1 / q) * z ** (1 / q_dual)
        return N ** (1 / q_dual) * z ** (1 / q)
    return 2.0 ** (N * prediction.exponent)
