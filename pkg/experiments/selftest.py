"""
Selftest Module
Acceptance suite: exact Haar algebra, filter properties, test-function
coefficient identities, the growth experiments, the norm oracles and
reproducibility. Each check reports pass, fail or skip.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from analysis.adversarial import (Section6Spec, build_atom, section5_coefficient,
                                  section6_function)
from analysis.errors import ConfigurationError, HaarLabError
from analysis.grid import SampledFunction, inner_product, make_grid, sample_haar
from analysis.haar import (HaarCoefficients, HaarSubset, SignAssignment, analyze, project,
                           sequence_norm, signed_project, split_by_sign, synthesize)
from analysis.littlewood_paley import (TLParams, build_filter_bank, convolve_band, f_norm,
                                       lemma_constants)
from utils.config import DEFAULT_EXPERIMENT_J_MAX, DEFAULT_SAMPLES, DEFAULT_SEED, MAX_J_MAX
from utils.csv_exporter import growth_report_text
from .growth import endpoint_contrast, growth_curve, max_feasible_N
from .oracles import naive_f_norm, naive_sequence_norm
from .settings import ExperimentConfig, build_resources

logger = logging.getLogger(__name__)

PASS = 'pass'
FAIL = 'fail'
SKIP = 'skip'

ALGEBRA_TOL = 1e-12
IDENTITY_TOL = 1e-10
ORACLE_RELATIVE_TOL = 1e-6

# the endpoint family needs j_max >= 2N + 9, so N = 4..8 is out of reach
ENDPOINT_N_RANGE = (2, 4)


@dataclass
class CheckResult:
    name: str
    status: str
    detail: str = ''
    seconds: float = 0.0


@dataclass
class SelftestReport:
    results: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """True only when every check that was run passed; a skip is not a pass."""
        return bool(self.results) and all(result.status == PASS for result in self.results)

    def summary_lines(self) -> List[str]:
        return [f"{r.name:<24} {r.status:<5} {r.seconds:8.2f}s  {r.detail}" for r in self.results]


@dataclass(frozen=True)
class SelftestOptions:
    quick: bool = False
    j_max: int = DEFAULT_EXPERIMENT_J_MAX
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    threads: Optional[int] = None

    @property
    def trials(self) -> int:
        return 50 if self.quick else 1000

    @property
    def corpus_size(self) -> int:
        return 10 if self.quick else 50


def _outcome(ok: bool, detail: str) -> Tuple[str, str]:
    return (PASS if ok else FAIL), detail


# --- exact algebra ----------------------------------------------------------

def _random_subset(rng: np.random.Generator, levels: range) -> HaarSubset:
    chosen = [j for j in levels if rng.random() < 0.5] or [int(rng.choice(list(levels)))]
    return HaarSubset({j: np.flatnonzero(rng.random(1 << j) < 0.5) for j in chosen})


def check_exact_algebra(options: SelftestOptions) -> Tuple[str, str]:
    grid = make_grid(12, 0, 1)
    rng = np.random.default_rng([options.seed, 1])
    levels = range(0, 8)
    worst = 0.0
    for _ in range(options.trials):
        f = SampledFunction(grid, rng.standard_normal(grid.n_points))
        g = SampledFunction(grid, rng.standard_normal(grid.n_points))
        E, F = _random_subset(rng, levels), _random_subset(rng, levels)
        signs = SignAssignment.draw(E.levels, rng.integers(0, 2 ** 31, size=2))
        scale = max(1.0, float(np.max(np.abs(f.samples))))

        roundtrip = synthesize(analyze(f)).samples - f.samples
        pf = project(f, E)
        idempotent = project(pf, E).samples - pf.samples
        adjoint = inner_product(pf, g) - inner_product(f, project(g, E))
        composed = project(project(f, F), E).samples - project(f, E.intersection(F)).samples
        plus, minus = split_by_sign(E, signs)
        split = (signed_project(f, E, signs).samples
                 - (project(f, plus).samples - project(f, minus).samples))

        j = int(rng.integers(0, grid.j_max))
        mu, nu = (int(v) for v in rng.integers(0, 1 << j, size=2))
        gram = math.ldexp(inner_product(sample_haar(grid, (j, mu)), sample_haar(grid, (j, nu))), j)
        ortho = abs(gram - (1.0 if mu == nu else 0.0))

        worst = max(worst, ortho,
                    float(np.max(np.abs(roundtrip))) / scale,
                    float(np.max(np.abs(idempotent))) / scale,
                    abs(adjoint) / (scale * max(1.0, float(np.max(np.abs(g.samples))))),
                    float(np.max(np.abs(composed))) / scale,
                    float(np.max(np.abs(split))) / scale)
    return _outcome(worst <= ALGEBRA_TOL, f"{options.trials} trials, worst {worst:.3e}")


# --- filters ----------------------------------------------------------------

def check_filter_lemmas(options: SelftestOptions) -> Tuple[str, str]:
    grid = make_grid(12, -1, 2)
    bank = build_filter_bank(3, 2.0 ** -4, grid)
    failures = []
    if bank.max_moment_residual > ALGEBRA_TOL:
        failures.append(f"moment residual {bank.max_moment_residual:.3e}")
    constants = lemma_constants(bank, p_values=(1.0, 2.0))
    if not (math.isfinite(constants.size_constant) and constants.size_constant > 0):
        failures.append(f"size constant {constants.size_constant}")

    # psi_k * h_{j,0} vanishes where the kernel window misses the jumps of h
    points = grid.points
    worst_zero = 0.0
    for j in range(0, bank.k_max):
        jumps = np.ldexp(np.array([0.0, 1.0, 2.0]), -j - 1)
        for k in range(j + 1, bank.k_max + 1):
            conv = convolve_band(sample_haar(grid, (j, 0)), bank, k).samples
            reach = math.ldexp(bank.support_radius, -k)
            away = np.min(np.abs(points[:, None] - jumps[None, :]), axis=1) >= reach
            worst_zero = max(worst_zero, float(np.max(np.abs(conv[away]))))
    if worst_zero > ALGEBRA_TOL:
        failures.append(f"smooth-region convolution {worst_zero:.3e}")

    worst_margin = math.inf
    for k in range(bank.k_max + 1):
        for mu in sorted({0, (1 << k) // 2, (1 << k) - 1}):
            conv = convolve_band(sample_haar(grid, (k, mu)), bank, k).samples
            # grid points x with 2^k x - mu in J
            offset = grid.x_lo << grid.j_max
            lo = math.ceil(math.ldexp(mu + bank.J[0], grid.j_max - k)) - offset
            hi = math.floor(math.ldexp(mu + bank.J[1], grid.j_max - k)) - offset
            margin = float(np.min(np.abs(conv[lo:hi + 1]))) - bank.c0 * (1 - 1e-9)
            worst_margin = min(worst_margin, margin)
    if worst_margin < 0:
        failures.append(f"calibration margin {worst_margin:.3e}")
    detail = (f"c0={bank.c0:.4g}, size constant {constants.size_constant:.4g}, "
              f"lp constant {constants.lp_constant:.4g}")
    return _outcome(not failures, "; ".join(failures) or detail)


# --- coefficient identities -------------------------------------------------

def check_coefficient_identities(options: SelftestOptions) -> Tuple[str, str]:
    grid = make_grid(12, -1, 2)
    atom = build_atom(grid=grid)
    worst5 = 0.0
    for k in range(atom.max_level + 1):
        for n in range(atom.max_level - k + 1):
            for mu in range(1 << k):
                value = section5_coefficient(atom, k, n, mu)
                worst5 = max(worst5, abs(value + math.ldexp(atom.half_mass, 1 - n)))

    grid6 = make_grid(14, -1, 2)
    atom6 = build_atom(grid=grid6)
    N = 2
    b = atom6.max_level - N + 1
    spec = Section6Spec((b - 1, b), N, ((b - N + 1, b),), 2.0,
                        SignAssignment.constant([b + N]))
    f, E = section6_function(spec, atom6)
    scale = 2.0 ** ((b + N) / 2.0)
    worst_diagonal, worst_off = 0.0, 0.0
    for j in E.levels:
        coeffs = analyze(f, [j])
        lattice = set(int(mu) for mu in E.positions(j))
        expected = scale * N * math.ldexp(atom6.half_mass, j - b - N)
        for mu in range(1 << j):
            value = coeffs[(j, mu)]
            if mu in lattice:
                worst_diagonal = max(worst_diagonal, abs(value - expected))
            elif mu + 1 not in lattice:
                worst_off = max(worst_off, abs(value))
    ok = max(worst5, worst_diagonal) <= IDENTITY_TOL and worst_off <= IDENTITY_TOL
    return _outcome(ok, f"rescaled {worst5:.2e}, endpoint diagonal {worst_diagonal:.2e}, "
                        f"off-diagonal {worst_off:.2e}")


# --- growth experiments -----------------------------------------------------

def _experiment(options: SelftestOptions, p: float, q: float, s: float,
                N_range: Tuple[int, int], **changes) -> ExperimentConfig:
    return ExperimentConfig(p, q, s, N_min=N_range[0], N_max=N_range[1], j_max=options.j_max,
                            samples=options.samples, seed=options.seed,
                            threads=options.threads, **changes)


def _clipped(config: ExperimentConfig) -> Optional[ExperimentConfig]:
    resources = build_resources(config)
    top = min(config.N_max, max_feasible_N(config, resources))
    if top - config.N_min + 1 < 3:
        return None
    return config.with_values(N_max=top)


def growth_law_config(options: SelftestOptions) -> Optional[ExperimentConfig]:
    """(6, 2, -0.7) over N = 3..8 clipped to the grid; None when fewer than 3 N resolve."""
    # every full-range row past N = 2 is capped at desk scale, so the protocol fits them all
    return _clipped(_experiment(options, 6.0, 2.0, -0.7, (3, 8), exclude_capped=False))


def check_growth_law(options: SelftestOptions) -> Tuple[str, str]:
    config = growth_law_config(options)
    if config is None:
        return SKIP, f"fewer than 3 feasible N at j_max={options.j_max}"
    report = growth_curve(config)
    ok = 0.12 <= report.fit.slope <= 0.28 and report.fit.r2 >= 0.9
    return _outcome(ok, f"N={config.N_min}..{config.N_max} slope {report.fit.slope:.4f} "
                        f"r2 {report.fit.r2:.3f}")


def check_unconditional(options: SelftestOptions) -> Tuple[str, str]:
    details, ok = [], True
    for p, q, s in ((3.0, 2.0, 0.0), (2.0, 3.0, 0.2)):
        config = _clipped(_experiment(options, p, q, s, (3, 8), exclude_capped=False))
        if config is None:
            return SKIP, f"fewer than 3 feasible N at j_max={options.j_max}"
        slope = growth_curve(config).fit.slope
        ok = ok and -0.05 <= slope <= 0.05
        details.append(f"({p:g},{q:g},{s:g}) slope {slope:.4f}")
    return _outcome(ok, "; ".join(details))


def endpoint_contrast_config(options: SelftestOptions) -> ExperimentConfig:
    """
    Contrast config on the coarsest grid (at least options.j_max) whose endpoint
    family resolves every N in ENDPOINT_N_RANGE.

    Raises:
        ConfigurationError: If no j_max up to MAX_J_MAX is fine enough
    """
    low, high = ENDPOINT_N_RANGE
    base = _experiment(options, 6.0, 2.0, -0.5, ENDPOINT_N_RANGE, set_builder='full_range',
                       candidate_families=('section6',), exclude_capped=False)
    for j_max in range(options.j_max, MAX_J_MAX + 1):
        config = base.with_values(j_max=j_max)
        if max_feasible_N(config, build_resources(config)) >= high:
            if j_max > options.j_max:
                logger.info("endpoint contrast runs at j_max=%d to resolve N=%d..%d",
                            j_max, low, high)
            return config
    raise ConfigurationError(
        'j_max', f"no j_max <= {MAX_J_MAX} resolves the endpoint family at N={high}")


def check_endpoint_contrast(options: SelftestOptions) -> Tuple[str, str]:
    config = endpoint_contrast_config(options)
    low, high = ENDPOINT_N_RANGE
    report = endpoint_contrast(6.0, 2.0, range(low, high + 1), config)
    ok = (report.increasing and 1.0 <= report.ratio_of_ratios <= 2.0
          and report.separated.fit.r2 >= 0.8)
    return _outcome(ok, f"j_max={config.j_max} N={low}..{high} ratio of ratios "
                        f"{report.ratio_of_ratios:.4f}, increasing {report.increasing}, "
                        f"separated r2 {report.separated.fit.r2:.3f}")


# --- norm oracles -----------------------------------------------------------

def oracle_corpus(grid, rng: np.random.Generator, size: int) -> List[SampledFunction]:
    """Random Haar polynomials mixed with smooth noise on [0, 1)."""
    corpus = []
    lo, hi = grid.index_of(0), grid.index_of(1)
    for i in range(size):
        entries = {}
        for _ in range(int(rng.integers(1, 6))):
            j = int(rng.integers(0, 8))
            entries[(j, int(rng.integers(0, 1 << j)))] = float(rng.uniform(-1, 1))
        samples = synthesize(HaarCoefficients.from_entries(grid, entries)).samples.copy()
        if i % 2:
            noise = np.zeros(grid.n_points)
            noise[lo:hi] = np.repeat(rng.standard_normal((hi - lo) // 64), 64)
            samples += noise
        corpus.append(SampledFunction(grid, samples))
    return corpus


def check_norm_oracles(options: SelftestOptions) -> Tuple[str, str]:
    grid = make_grid(12, -1, 2)
    bank = build_filter_bank(3, 2.0 ** -4, grid)
    rng = np.random.default_rng([options.seed, 7])
    worst_local, worst_dyadic = 0.0, 0.0
    for i, f in enumerate(oracle_corpus(grid, rng, options.corpus_size)):
        params = TLParams(float(rng.uniform(1.2, 6)), float(rng.uniform(1.2, 6)),
                          float(rng.uniform(-0.9, 0.9)))
        fast = f_norm(f, params, bank)
        slow = naive_f_norm(f, params, bank)
        worst_local = max(worst_local, abs(fast - slow) / max(abs(slow), 1e-300))
        coeffs = analyze(f)
        fast = sequence_norm(coeffs, params.p, params.q, params.s)
        slow = naive_sequence_norm(coeffs, params.p, params.q, params.s)
        worst_dyadic = max(worst_dyadic, abs(fast - slow) / max(abs(slow), 1e-300))
    ok = max(worst_local, worst_dyadic) <= ORACLE_RELATIVE_TOL
    return _outcome(ok, f"{options.corpus_size} functions, local {worst_local:.2e}, "
                        f"dyadic {worst_dyadic:.2e}")


# --- reproducibility --------------------------------------------------------

def check_reproducibility(options: SelftestOptions) -> Tuple[str, str]:
    config = ExperimentConfig(6.0, 2.0, -0.7, N_min=1, N_max=3, j_max=10, samples=2,
                              seed=options.seed, threads=options.threads,
                              exclude_capped=False)
    first = growth_report_text(growth_curve(config))
    again = ExperimentConfig.from_mapping(config.to_mapping())
    second = growth_report_text(growth_curve(again))
    ok = again == config and first == second
    return _outcome(ok, "config round trip and report text identical" if ok
                    else "re-run differs from the first run")


CHECKS: List[Tuple[str, Callable[[SelftestOptions], Tuple[str, str]]]] = [
    ('exact_algebra', check_exact_algebra),
    ('filter_lemmas', check_filter_lemmas),
    ('coefficient_identities', check_coefficient_identities),
    ('growth_law', check_growth_law),
    ('unconditional_control', check_unconditional),
    ('endpoint_contrast', check_endpoint_contrast),
    ('norm_oracles', check_norm_oracles),
    ('reproducibility', check_reproducibility),
]

# left out of a quick run unless named explicitly
HEAVY_CHECKS = frozenset({'growth_law', 'unconditional_control', 'endpoint_contrast'})


def selected_checks(options: SelftestOptions, only: Optional[List[str]] = None) -> List[str]:
    """Names of the checks a run performs, in suite order."""
    if only is not None:
        return [name for name, _ in CHECKS if name in only]
    return [name for name, _ in CHECKS if not (options.quick and name in HEAVY_CHECKS)]


def run_selftest(options: Optional[SelftestOptions] = None,
                 only: Optional[List[str]] = None) -> SelftestReport:
    """
    Run the acceptance checks (all, or those named in only) and collect their outcomes.

    A quick run leaves out HEAVY_CHECKS; the report lists only the checks that ran.
    """
    options = options or SelftestOptions()
    names = selected_checks(options, only)
    if options.quick and only is None:
        logger.info("quick mode leaves out %s", ", ".join(sorted(HEAVY_CHECKS)))
    report = SelftestReport()
    for name, check in CHECKS:
        if name not in names:
            continue
        started = time.perf_counter()
        try:
            status, detail = check(options)
        except HaarLabError as exc:
            status, detail = FAIL, f"{type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - started
        logger.info("selftest %s: %s (%s)", name, status, detail)
        report.results.append(CheckResult(name, status, detail, elapsed))
    return report
