"""
Settings Module
Typed experiment configuration and the numerical objects built from it.

ExperimentConfig converts to and from the flat string mappings handled by
utils.workspace, so a report's embedded config block reproduces the run.
"""

import logging
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Dict, Mapping, NamedTuple, Optional, Tuple

from analysis.adversarial import Atom, build_atom
from analysis.errors import ConfigurationError
from analysis.grid import DyadicGrid, make_grid
from analysis.littlewood_paley import FilterBank, TLParams, build_filter_bank
from utils.config import (ALPHA_PROFILES, ATOM_SUPPORT_RADIUS, CANDIDATE_FAMILIES,
                          DEFAULT_ATOM_M0, DEFAULT_BANK_SUPPORT, DEFAULT_EXPERIMENT_J_MAX,
                          DEFAULT_M1, DEFAULT_N_RANGE, DEFAULT_R2_MIN, DEFAULT_SAMPLES,
                          DEFAULT_SEED, DEFAULT_SLOPE_TOL, DEFAULT_WINDOW, FIT_AXES,
                          SET_BUILDERS)
from .regimes import classify_regime

logger = logging.getLogger(__name__)

AUTO = 'auto'


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ('1', 'true', 'yes', 'on'):
        return True
    if lowered in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_int_tuple(raw: str) -> Tuple[int, ...]:
    return tuple(int(v) for v in raw.split(',') if v.strip())


def _parse_str_tuple(raw: str) -> Tuple[str, ...]:
    return tuple(v.strip() for v in raw.split(',') if v.strip())


def _optional(parse: Callable[[str], object]) -> Callable[[str], object]:
    def parse_optional(raw: str):
        return None if raw.strip().lower() in (AUTO, 'none', '') else parse(raw)
    return parse_optional


def _format(value) -> str:
    if value is None:
        return AUTO
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return str(value)


_PARSERS: Dict[str, Callable[[str], object]] = {
    'p': float, 'q': float, 's': float,
    'N_min': int, 'N_max': int,
    'set_builder': str.strip,
    'levels': _parse_int_tuple,
    'separation': _optional(int),
    'candidate_families': _parse_str_tuple,
    'samples': int, 'seed': int,
    'j_max': int, 'x_lo': int, 'x_hi': int,
    'm1': int, 'bank_support': float, 'k_max': _optional(int),
    'atom_m0': int, 'atom_support': float,
    'alphas': str.strip, 'max_intervals': _optional(int),
    'slope_tol': float, 'r2_min': float,
    'exclude_capped': _parse_bool, 'fit_against': str.strip,
    'threads': _optional(int),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """
    One growth-curve experiment.

    Attributes:
        p, q, s: Exponents of F^s_{p,q}
        N_min, N_max: Inclusive range of the size parameter N (Lambda = 2^N)
        set_builder: 'full_range', 'separated' or 'custom'
        levels: Level set for the custom builder
        separation: Level spacing for the separated builder (N when None)
        candidate_families: Enabled candidate families, in evaluation order
        samples: Sign draws S per family
        seed: Base seed for every derived RNG stream
        j_max, x_lo, x_hi: Grid
        m1, bank_support, k_max: Filter bank and norm truncation
        atom_m0, atom_support: Test-function atom
        alphas: 'top' (alpha_N = 1) or 'equal' (alpha_1..alpha_N = 1) weights
        max_intervals: Cap on endpoint intervals per candidate
        slope_tol, r2_min: Verdict thresholds
        exclude_capped: Leave resolution-capped rows out of the fit (set False to fit them)
        fit_against: 'N' or 'log2N' as the fit abscissa
        threads: Worker cap (HPL_THREADS when None)
    """

    p: float
    q: float
    s: float
    N_min: int = DEFAULT_N_RANGE[0]
    N_max: int = DEFAULT_N_RANGE[1]
    set_builder: str = 'full_range'
    levels: Tuple[int, ...] = ()
    separation: Optional[int] = None
    candidate_families: Tuple[str, ...] = ('section5',)
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    j_max: int = DEFAULT_EXPERIMENT_J_MAX
    x_lo: int = DEFAULT_WINDOW[0]
    x_hi: int = DEFAULT_WINDOW[1]
    m1: int = DEFAULT_M1
    bank_support: float = DEFAULT_BANK_SUPPORT
    k_max: Optional[int] = None
    atom_m0: int = DEFAULT_ATOM_M0
    atom_support: float = ATOM_SUPPORT_RADIUS
    alphas: str = 'top'
    max_intervals: Optional[int] = None
    slope_tol: float = DEFAULT_SLOPE_TOL
    r2_min: float = DEFAULT_R2_MIN
    exclude_capped: bool = True
    fit_against: str = 'N'
    threads: Optional[int] = None
    regime: str = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'levels', tuple(sorted({int(l) for l in self.levels})))
        object.__setattr__(self, 'candidate_families', tuple(self.candidate_families))
        object.__setattr__(self, 'regime', classify_regime(self.p, self.q, self.s))

        if self.N_min < 1:
            raise ConfigurationError('N_min', f"must be >= 1, got {self.N_min}")
        if self.N_max < self.N_min:
            raise ConfigurationError('N_max', f"{self.N_max} is below N_min = {self.N_min}")
        if self.set_builder not in SET_BUILDERS:
            raise ConfigurationError('set_builder', f"expected one of {SET_BUILDERS}, got {self.set_builder!r}")
        if self.set_builder == 'custom' and not self.levels:
            raise ConfigurationError('levels', "the custom set builder needs levels")
        if self.levels and self.levels[0] < 0:
            raise ConfigurationError('levels', "levels must be >= 0")
        if self.separation is not None and self.separation < 1:
            raise ConfigurationError('separation', f"must be >= 1, got {self.separation}")
        if not self.candidate_families:
            raise ConfigurationError('candidate_families', "enable at least one family")
        unknown = [name for name in self.candidate_families if name not in CANDIDATE_FAMILIES]
        if unknown:
            raise ConfigurationError('candidate_families', f"unknown families {unknown}")
        if len(set(self.candidate_families)) != len(self.candidate_families):
            raise ConfigurationError('candidate_families', "families listed twice")
        if self.samples < 1:
            raise ConfigurationError('samples', f"must be >= 1, got {self.samples}")
        if self.alphas not in ALPHA_PROFILES:
            raise ConfigurationError('alphas', f"expected one of {ALPHA_PROFILES}, got {self.alphas!r}")
        if self.fit_against not in FIT_AXES:
            raise ConfigurationError('fit_against', f"expected one of {FIT_AXES}, got {self.fit_against!r}")
        if self.max_intervals is not None and self.max_intervals < 1:
            raise ConfigurationError('max_intervals', f"must be >= 1, got {self.max_intervals}")
        if not self.slope_tol > 0:
            raise ConfigurationError('slope_tol', f"must be positive, got {self.slope_tol}")
        if not 0 <= self.r2_min <= 1:
            raise ConfigurationError('r2_min', f"must lie in [0, 1], got {self.r2_min}")
        if self.threads is not None and self.threads < 1:
            raise ConfigurationError('threads', f"must be >= 1, got {self.threads}")

    @property
    def N_range(self) -> range:
        return range(self.N_min, self.N_max + 1)

    @property
    def params(self) -> TLParams:
        return TLParams(self.p, self.q, self.s, self.k_max)

    def with_values(self, **changes) -> 'ExperimentConfig':
        return replace(self, **changes)

    @classmethod
    def from_mapping(cls, values: Mapping[str, str]) -> 'ExperimentConfig':
        """
        Build a config from raw `key = value` strings.

        Raises:
            ConfigurationError: On an unknown key, a missing p/q/s or an unparsable value
        """
        kwargs = {}
        for key, raw in values.items():
            parse = _PARSERS.get(key)
            if parse is None:
                raise ConfigurationError(key, "unknown configuration key")
            try:
                kwargs[key] = parse(str(raw))
            except ValueError as exc:
                raise ConfigurationError(key, f"bad value {raw!r}: {exc}") from None
        for key in ('p', 'q', 's'):
            if key not in kwargs:
                raise ConfigurationError(key, "required")
        return cls(**kwargs)

    def to_mapping(self) -> Dict[str, str]:
        """Every field as a string, in declaration order; from_mapping inverts it."""
        return {f.name: _format(getattr(self, f.name)) for f in fields(self) if f.init}


class Resources(NamedTuple):
    grid: DyadicGrid
    bank: FilterBank
    atom: Atom
    params: TLParams


def build_resources(config: ExperimentConfig) -> Resources:
    """
    Grid, filter bank, atom and norm parameters for a config.

    Raises:
        ConfigurationError: If the grid or bank parameters are invalid
        ConstructionError: If a kernel cannot be built
    """
    grid = make_grid(config.j_max, config.x_lo, config.x_hi)
    bank = build_filter_bank(config.m1, config.bank_support, grid)
    atom = build_atom(config.atom_m0, config.atom_support, grid)
    params = config.params
    params.resolve_k_max(bank)
    if bank.m1 + 1 <= abs(config.s):
        raise ConfigurationError('m1', f"m1 + 1 = {bank.m1 + 1} must exceed |s| = {abs(config.s)}")
    logger.info("resources: grid %s, bank %s, atom levels <= %d, k_max %d",
                grid.describe(), bank.label(), atom.max_level, params.resolve_k_max(bank))
    return Resources(grid, bank, atom, params)


def default_N(level_count: int) -> int:
    """N with 2^N <= level_count < 2^{N+1}."""
    if level_count < 1:
        raise ConfigurationError('levels', "need at least one level")
    return int(level_count).bit_length() - 1
