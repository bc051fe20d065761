"""
Growth Module
Growth curves of the projection-norm estimates in Lambda = 2^N, the endpoint
contrast between dense and separated frequency sets, and the ratio between the
dyadic sequence norm and the local-means norm.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from analysis.adversarial import Section5Spec, section5_function
from analysis.errors import ConfigurationError, DegenerateInputError, DomainError, FittingError
from analysis.grid import SampledFunction
from analysis.haar import HaarSubset, SignAssignment, analyze, density_stats, sequence_norm
from analysis.littlewood_paley import FilterBank, TLParams, f_norm
from .fitting import SlopeFit, fit_slope, verdict
from .projection import estimate_projection_norm_lb
from .regimes import ENDPOINT, UNCONDITIONAL, Prediction, predicted_exponent, reference_upper_bound
from .settings import ExperimentConfig, Resources, build_resources

logger = logging.getLogger(__name__)

MIN_FIT_ROWS = 3


# --- level sets -------------------------------------------------------------

class LevelSet(NamedTuple):
    levels: Tuple[int, ...]
    capped: bool
    description: str


def level_ceiling(config: ExperimentConfig, resources: Resources, N: int) -> int:
    """Largest level of A every enabled family can place at this N."""
    a_max = resources.atom.max_level
    limits = {
        'section5': a_max - N,
        'section6': a_max - N + 1,
        'smooth_atom': a_max,
        'random_bandlimited': resources.grid.j_max - 1,
    }
    ceiling = min(limits[family] for family in config.candidate_families)
    return min(ceiling, resources.grid.j_max - 1)


def _feasible(config: ExperimentConfig, resources: Resources, N: int) -> bool:
    ceiling = level_ceiling(config, resources, N)
    if ceiling < 0:
        return False
    if config.set_builder == 'custom' and max(config.levels) > ceiling:
        return False
    if 'section6' in config.candidate_families:
        # an interval [b - N + 1, b] needs N + 3 <= b <= a_max - N + 1
        return resources.atom.max_level - N + 1 >= N + 3
    return True


def max_feasible_N(config: ExperimentConfig, resources: Resources) -> int:
    """Largest N the grid resolves for this config (0 when none is)."""
    N = 0
    while _feasible(config, resources, N + 1):
        N += 1
    return N


def _describe_levels(builder: str, levels: Sequence[int]) -> str:
    if len(levels) > 1 and list(levels) == list(range(levels[0], levels[-1] + 1)):
        return f"{builder}:{levels[0]}-{levels[-1]}"
    return f"{builder}:" + ";".join(str(l) for l in levels)


def build_level_set(config: ExperimentConfig, resources: Resources, N: int) -> LevelSet:
    """
    Level set A at size parameter N.

    full_range takes levels 0, 1, ... with #A = 2^N, separated takes levels
    0, d, 2d, ... (d = separation, N by default) with #A <= 2^N; both are cut at
    the resolution ceiling and flagged capped when that removed levels.

    Raises:
        DomainError: If N is not resolvable, naming the largest feasible N
    """
    if not _feasible(config, resources, N):
        raise DomainError(
            f"N={N} is not resolvable at j_max={resources.grid.j_max}; the largest "
            f"feasible N for this config is {max_feasible_N(config, resources)}")
    ceiling = level_ceiling(config, resources, N)
    wanted = 1 << N
    if config.set_builder == 'full_range':
        count = min(wanted, ceiling + 1)
        levels = tuple(range(count))
        capped = count < wanted
    elif config.set_builder == 'separated':
        step = config.separation or N
        available = tuple(range(0, ceiling + 1, step))
        levels = available[:wanted]
        capped = len(levels) < wanted
    else:
        levels, capped = config.levels, False
    if capped:
        logger.warning("N=%d: #A capped at %d (2^N = %d) by j_max=%d",
                       N, len(levels), wanted, resources.grid.j_max)
    return LevelSet(levels, capped, _describe_levels(config.set_builder, levels))


# --- growth curves ----------------------------------------------------------

@dataclass(frozen=True)
class GrowthRow:
    N: int
    lam: int
    set_desc: str
    size: int
    z_bar: Optional[int]
    z_under: Optional[int]
    z_n: Optional[int]
    gamma_hat: float
    family: Optional[str]
    seed: Optional[Tuple[int, ...]]
    capped: bool
    upper_bound: float

    @property
    def seed_text(self) -> str:
        return ":".join(str(v) for v in self.seed) if self.seed else ''


@dataclass(frozen=True)
class GrowthReport:
    config: ExperimentConfig
    rows: Tuple[GrowthRow, ...]
    fit: Optional[SlopeFit]
    prediction: Prediction
    predicted: Optional[float]
    verdict: str

    @property
    def fit_axis(self) -> str:
        return self.config.fit_against

    def gamma(self, N: int) -> float:
        for row in self.rows:
            if row.N == N:
                return row.gamma_hat
        raise KeyError(N)


def _predicted_slope(prediction: Prediction, axis: str) -> Optional[float]:
    if axis == 'N':
        return prediction.exponent
    if prediction.regime == ENDPOINT:
        return prediction.lower_log_rate
    if prediction.regime == UNCONDITIONAL:
        return 0.0
    return None


def fit_rows(rows: Sequence[GrowthRow], axis: str, exclude_capped: bool = True) -> SlopeFit:
    """
    Fit log2 gamma_hat against N (or log2 N), leaving capped rows out unless told otherwise.

    Raises:
        FittingError: With fewer than 3 usable rows or a zero estimate
    """
    usable = [row for row in rows if not (exclude_capped and row.capped)]
    if len(usable) < MIN_FIT_ROWS:
        left_out = len(rows) - len(usable)
        hint = (f"; {left_out} capped rows left out (exclude_capped = false fits them)"
                if left_out else "")
        raise FittingError(f"need at least {MIN_FIT_ROWS} rows to fit, got {len(usable)}{hint}")
    points = []
    for row in usable:
        if row.gamma_hat <= 0:
            raise FittingError(f"estimate at N={row.N} is zero; no logarithm")
        x = float(row.N) if axis == 'N' else math.log2(row.N)
        points.append((x, math.log2(row.gamma_hat)))
    return fit_slope(points)


def growth_row(config: ExperimentConfig, resources: Resources, N: int) -> GrowthRow:
    """One row: level set, density counts, estimate and reference envelope at N."""
    level_set = build_level_set(config, resources, N)
    E = HaarSubset.full_levels(level_set.levels)
    stats = density_stats(level_set.levels, N)
    estimate = estimate_projection_norm_lb(E, resources.params, config, resources.bank,
                                           resources.atom, N)
    upper = reference_upper_bound(config.p, config.q, config.s, N, stats.z_n)
    logger.info("N=%d #A=%d gamma_hat=%.6g (%s)", N, len(level_set.levels),
                estimate.value, estimate.family)
    return GrowthRow(N, 1 << N, level_set.description, len(level_set.levels),
                     stats.z_bar, stats.z_under, stats.z_n, estimate.value,
                     estimate.family, estimate.seed, level_set.capped, upper)


def growth_curve(config: ExperimentConfig,
                 resources: Optional[Resources] = None) -> GrowthReport:
    """
    Estimate the projection norms over config.N_range and compare their growth
    with the predicted exponent.

    Returns:
        GrowthReport with rows sorted by N, the slope fit and the verdict

    Raises:
        FittingError: If the range gives fewer than 3 usable rows
        DomainError: If some N is not resolvable (the message names the largest feasible N)
    """
    if len(config.N_range) < MIN_FIT_ROWS:
        raise FittingError(f"N range {config.N_min}..{config.N_max} has fewer than "
                           f"{MIN_FIT_ROWS} values")
    if resources is None:
        resources = build_resources(config)
    rows = tuple(growth_row(config, resources, N) for N in config.N_range)
    fit = fit_rows(rows, config.fit_against, config.exclude_capped)
    prediction = predicted_exponent(config.p, config.q, config.s)
    predicted = _predicted_slope(prediction, config.fit_against)
    outcome = verdict(fit, predicted, config.slope_tol, config.r2_min)
    logger.info("slope %.4f (r2 %.3f) vs predicted %s: %s",
                fit.slope, fit.r2, predicted, outcome)
    return GrowthReport(config, rows, fit, prediction, predicted, outcome)


# --- endpoint contrast ------------------------------------------------------

@dataclass(frozen=True)
class ContrastReport:
    full: GrowthReport
    separated: GrowthReport
    ratios: Dict[int, float]
    ratio_of_ratios: float
    expected_ratio_of_ratios: float

    @property
    def increasing(self) -> bool:
        values = [self.ratios[N] for N in sorted(self.ratios)]
        return all(b > a for a, b in zip(values, values[1:]))

    @property
    def verdict(self) -> str:
        return self.separated.verdict


def endpoint_contrast(p: float, q: float, N_range: Sequence[int],
                      config: ExperimentConfig) -> ContrastReport:
    """
    Compare dense and separated frequency sets at s = -1/q'.

    The dense run uses full-range A with the endpoint family, the separated run
    uses N-separated A with equal-weight rescaled atoms and is fitted against
    log2 N. The ratio gamma_full / gamma_sep is expected to grow like N^{1/q}.

    Raises:
        ConfigurationError: Unless q < p
    """
    if not q < p:
        raise ConfigurationError('q', f"the endpoint contrast needs q < p, got p={p}, q={q}")
    N_values = sorted(N_range)
    if not N_values:
        raise ConfigurationError('N_range', "empty")
    s = 1.0 / q - 1.0
    base = config.with_values(p=p, q=q, s=s, N_min=N_values[0], N_max=N_values[-1])
    full_config = base.with_values(set_builder='full_range', candidate_families=('section6',),
                                   fit_against='N')
    separated_config = base.with_values(set_builder='separated', candidate_families=('section5',),
                                        alphas='equal', fit_against='log2N')
    resources = build_resources(base)
    full = growth_curve(full_config, resources)
    separated = growth_curve(separated_config, resources)

    ratios: Dict[int, float] = {}
    for N in base.N_range:
        denominator = separated.gamma(N)
        if denominator == 0:
            raise DegenerateInputError(f"separated estimate vanishes at N={N}")
        ratios[N] = full.gamma(N) / denominator
    first, last = N_values[0], N_values[-1]
    ratio_of_ratios = ratios[last] / ratios[first]
    expected = (last / first) ** (1.0 / q)
    logger.info("endpoint contrast: ratio of ratios %.4f (expected about %.4f)",
                ratio_of_ratios, expected)
    return ContrastReport(full, separated, ratios, ratio_of_ratios, expected)


# --- norm equivalence -------------------------------------------------------

class EquivalenceStats(NamedTuple):
    ratios: Tuple[float, ...]
    minimum: float
    maximum: float
    spread: float


def equivalence_ratio(corpus: Sequence[SampledFunction], params: TLParams,
                      bank: FilterBank) -> EquivalenceStats:
    """
    Ratios sequence_norm(analyze(f)) / f_norm(f) over a corpus.

    Raises:
        DegenerateInputError: On an empty corpus or a member with zero norm
    """
    if not corpus:
        raise DegenerateInputError("empty corpus")
    ratios: List[float] = []
    for i, f in enumerate(corpus):
        local = f_norm(f, params, bank)
        if local == 0:
            raise DegenerateInputError(f"corpus member {i} has zero norm")
        dyadic = sequence_norm(analyze(f), params.p, params.q, params.s)
        ratios.append(dyadic / local)
    values = np.asarray(ratios)
    minimum, maximum = float(values.min()), float(values.max())
    return EquivalenceStats(tuple(ratios), minimum, maximum, maximum / minimum)


def section5_corpus(config: ExperimentConfig, resources: Resources,
                    N_values: Sequence[int]) -> List[SampledFunction]:
    """One rescaled-atom function per N on its full-range level set, signs from the config seed."""
    corpus = []
    full = config.with_values(set_builder='full_range', candidate_families=('section5',))
    for N in N_values:
        levels = build_level_set(full, resources, N).levels
        signs = SignAssignment.draw(levels, [config.seed, N])
        spec = Section5Spec.top_only(levels, N, config.s, config.q, signs)
        corpus.append(section5_function(spec, resources.atom))
    return corpus
