"""
Projection Module
Certified lower bounds for Haar projection norms.

For a Haar subset E, signs t split E into E+ and E-. Every candidate f gives
the lower bound max(||P_{E+} f||, ||P_{E-} f||, ||T_t f|| / 2) / ||f|| on the
larger of the two projection norms, since T_t = P_{E+} - P_{E-}. The estimate
is the maximum over candidate functions and seeded sign draws.

Seeds are derived as (seed, N, family index, sample index), with the family
index taken from the global family list, so adding samples or families only
adds terms to the maximum.
"""

import itertools
import logging
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from analysis.adversarial import (Atom, Section5Spec, Section6Spec, endpoint_intervals,
                                  random_smooth_atom_family, section5_function,
                                  section6_function, smooth_atom_sum)
from analysis.errors import ConfigurationError, DegenerateInputError, DomainError
from analysis.grid import DyadicGrid, SampledFunction
from analysis.haar import (HaarCoefficients, HaarSubset, SignAssignment, project,
                           split_by_sign, synthesize)
from analysis.littlewood_paley import FilterBank, TLParams, convolve_band, f_norm
from utils.config import CANDIDATE_FAMILIES
from utils.parallel import ordered_map
from .settings import ExperimentConfig, default_N

logger = logging.getLogger(__name__)

EXPLICIT = 'explicit'
FAMILY_INDEX = {name: i for i, name in enumerate(CANDIDATE_FAMILIES + (EXPLICIT,))}

SeedTuple = Tuple[int, ...]


class Candidate(NamedTuple):
    """A test function with the seed it was drawn from and an optional own Haar subset."""

    family: str
    seed: SeedTuple
    function: SampledFunction
    subset: Optional[HaarSubset] = None


class Estimate(NamedTuple):
    value: float
    family: Optional[str]
    seed: Optional[SeedTuple]
    evaluated: int


class CandidateContext(NamedTuple):
    levels: Tuple[int, ...]
    N: int
    params: TLParams
    bank: FilterBank
    atom: Optional[Atom]
    alphas: str = 'top'
    max_intervals: Optional[int] = None


def derive_seed(base: int, N: int, family: str, index: int) -> SeedTuple:
    return (int(base), int(N), FAMILY_INDEX[family], int(index))


def explicit_seed(base: int, N: int, candidate: int, index: int) -> SeedTuple:
    return derive_seed(base, N, EXPLICIT, candidate) + (int(index),)


def _sign_seed(seed: SeedTuple) -> List[int]:
    return list(seed) + [1]


def explicit_draws(E: HaarSubset, config: ExperimentConfig, N: int,
                   candidate: int = 0) -> List[SignAssignment]:
    """Sign draws the estimator uses for the explicit candidate with the given position."""
    return [SignAssignment.draw(E.levels, _sign_seed(explicit_seed(config.seed, N, candidate, i)))
            for i in range(config.samples)]


def projection_ratio(f: SampledFunction, E: HaarSubset, signs: SignAssignment,
                     params: TLParams, bank: FilterBank,
                     base: Optional[float] = None) -> float:
    """
    max(||P_{E+} f||, ||P_{E-} f||, ||T_t f|| / 2) / ||f|| in the local-means norm.

    Raises:
        DegenerateInputError: If ||f|| vanishes
    """
    norm = f_norm(f, params, bank) if base is None else base
    if norm == 0:
        raise DegenerateInputError("candidate has zero norm")
    if not E:
        return 0.0
    plus, minus = split_by_sign(E, signs)
    zero = SampledFunction.zeros(f.grid)
    positive = project(f, plus) if plus else zero
    negative = project(f, minus) if minus else zero
    sizes = [f_norm(positive, params, bank) if plus else 0.0,
             f_norm(negative, params, bank) if minus else 0.0,
             f_norm(positive - negative, params, bank) / 2]
    return max(sizes) / norm


def _atom_for(family: str, context: CandidateContext) -> Atom:
    if context.atom is None:
        raise ConfigurationError('candidate_families', f"family {family!r} needs an atom")
    return context.atom


def build_candidate(family: str, context: CandidateContext, seed: SeedTuple) -> Candidate:
    """
    Draw one candidate of a family.

    Raises:
        DomainError: If the family cannot be placed at this N on the grid
        ConfigurationError: On an unknown family
    """
    candidate_seed = list(seed) + [0]
    levels, N = context.levels, context.N
    if family == 'section5':
        atom = _atom_for(family, context)
        signs = SignAssignment.draw(levels, candidate_seed)
        build = Section5Spec.equal_weights if context.alphas == 'equal' else Section5Spec.top_only
        spec = build(levels, N, context.params.s, context.params.q, signs)
        return Candidate(family, seed, section5_function(spec, atom))
    if family == 'section6':
        atom = _atom_for(family, context)
        intervals = endpoint_intervals(levels, N, atom.max_level - N + 1, context.max_intervals)
        if not intervals:
            raise DomainError(f"no endpoint interval of length N={N} fits below level "
                              f"{atom.max_level - N + 1}")
        tops = [hi + N for _, hi in intervals]
        spec = Section6Spec(levels, N, intervals, context.params.q,
                            SignAssignment.draw(tops, candidate_seed))
        function, subset = section6_function(spec, atom)
        return Candidate(family, seed, function, subset)
    if family == 'smooth_atom':
        atom = _atom_for(family, context)
        usable = [l for l in levels if l <= atom.max_level]
        if not usable:
            raise DomainError(f"no level of A is below the atom limit {atom.max_level}")
        rng = np.random.default_rng(candidate_seed)
        smooth = random_smooth_atom_family(rng, 0, usable)
        return Candidate(family, seed, smooth_atom_sum(smooth, context.params.s, atom))
    if family == 'random_bandlimited':
        bank = context.bank
        grid = bank.grid
        rng = np.random.default_rng(candidate_seed)
        noise = np.zeros(grid.n_points)
        lo, hi = grid.index_of(0), grid.index_of(1)
        noise[lo:hi] = rng.standard_normal(hi - lo)
        source = SampledFunction(grid, noise)
        total = np.zeros(grid.n_points)
        for k in range(context.params.resolve_k_max(bank) + 1):
            total += 2.0 ** (-k * context.params.s) * convolve_band(source, bank, k).samples
        return Candidate(family, seed, SampledFunction(grid, total))
    raise ConfigurationError('candidate_families', f"unknown family {family!r}")


def estimate_projection_norm_lb(E: HaarSubset, params: TLParams, config: ExperimentConfig,
                                bank: FilterBank, atom: Optional[Atom] = None,
                                N: Optional[int] = None,
                                candidates: Sequence[SampledFunction] = (),
                                families: Optional[Sequence[str]] = None) -> Estimate:
    """
    Lower bound for the larger of ||P_{E+}|| and ||P_{E-}|| on F^s_{p,q}.

    Args:
        E: Haar subset on the bank grid
        params: Norm exponents
        config: Enabled families, samples S, base seed, interval cap, threads
        bank: Filter bank of the norm
        atom: Atom for the atom-based families
        N: Size parameter of the families (from #HF(E) when None)
        candidates: Explicit candidate functions, each tried with S sign draws
        families: Families to draw from instead of config.candidate_families

    Returns:
        Estimate with the best value and the first maximal (family, seed)

    Raises:
        DegenerateInputError: If every candidate has zero norm
        DomainError: If a family cannot be built on the grid
    """
    if not E:
        return Estimate(0.0, None, None, 0)
    E.validate(bank.grid)
    N = default_N(len(E.levels)) if N is None else int(N)
    context = CandidateContext(E.levels, N, params, bank, atom, config.alphas,
                               config.max_intervals)

    tasks: List[Tuple[str, SeedTuple, Optional[SampledFunction]]] = []
    for family in (config.candidate_families if families is None else families):
        tasks.extend((family, derive_seed(config.seed, N, family, i), None)
                     for i in range(config.samples))
    for c, function in enumerate(candidates):
        tasks.extend((EXPLICIT, explicit_seed(config.seed, N, c, i), function)
                     for i in range(config.samples))

    def evaluate(task) -> Optional[Tuple[float, SeedTuple]]:
        family, seed, function = task
        if function is None:
            candidate = build_candidate(family, context, seed)
        else:
            candidate = Candidate(family, seed, function)
        base = f_norm(candidate.function, params, bank)
        if base == 0:
            return None
        target = E if candidate.subset is None else E.intersection(candidate.subset)
        signs = SignAssignment.draw(E.levels, _sign_seed(seed))
        return projection_ratio(candidate.function, target, signs, params, bank, base), seed

    best = Estimate(0.0, None, None, 0)
    evaluated = 0
    for task, result in zip(tasks, ordered_map(evaluate, tasks, config.threads)):
        if result is None:
            continue
        evaluated += 1
        value, seed = result
        if best.family is None or value > best.value:
            best = Estimate(value, task[0], seed, 0)
    if evaluated == 0:
        raise DegenerateInputError("every candidate has zero norm")
    logger.debug("estimate %.6g from %s seed %s over %d candidates",
                 best.value, best.family, best.seed, evaluated)
    return best._replace(evaluated=evaluated)


def haar_polynomials(span: HaarSubset, max_active: int, grid: DyadicGrid) -> Iterator[HaarCoefficients]:
    """Every Haar polynomial on span with 1..max_active coefficients equal to +-1."""
    indices = list(span.indices())
    for count in range(1, min(max_active, len(indices)) + 1):
        for chosen in itertools.combinations(indices, count):
            for signs in itertools.product((1.0, -1.0), repeat=count):
                yield HaarCoefficients.from_entries(grid, dict(zip(chosen, signs)))


class OracleResult(NamedTuple):
    value: float
    best: Optional[HaarCoefficients]
    checked: int


def exhaustive_haar_search(E: HaarSubset, params: TLParams, bank: FilterBank,
                           span: HaarSubset, max_active: int,
                           draws: Sequence[SignAssignment]) -> OracleResult:
    """
    Brute-force ratio over all +-1 Haar polynomials on span with at most max_active terms.

    Each polynomial is tried with every sign draw, using the same ratio as
    estimate_projection_norm_lb.
    """
    if max_active < 1:
        raise ConfigurationError('max_active', f"must be >= 1, got {max_active}")
    span.validate(bank.grid)
    best_value, best, checked = 0.0, None, 0
    for coeffs in haar_polynomials(span, max_active, bank.grid):
        f = synthesize(coeffs)
        base = f_norm(f, params, bank)
        checked += 1
        for signs in draws:
            value = projection_ratio(f, E, signs, params, bank, base)
            if value > best_value:
                best_value, best = value, coeffs
    return OracleResult(best_value, best, checked)
