"""
Adversarial Module
Test functions that drive Haar projections apart: the odd atom eta, smooth-atom
sums over separated point sets, the rescaled-atom family used for polynomial
growth, and the endpoint family H_l with its sparse index set.

All functions are sums of dilated, translated copies of one piecewise-constant
atom, placed exactly on the grid. Atom placement at dilation level a needs
a <= atom.max_level.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from utils.config import ATOM_SUPPORT_RADIUS, DEFAULT_ATOM_CELLS, DEFAULT_ATOM_M0
from .errors import ConfigurationError, ConstructionError, DomainError
from .grid import DyadicGrid, SampledFunction, inner_product, lp_norm_values, sample_haar
from .haar import HaarSubset, SignAssignment
from .kernels import CellProfile, bump_derivative_profile
from .littlewood_paley import place_profile

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Atom:
    """
    Odd atom eta on (-r, r) with vanishing moments 0..m0 and 2 * integral_0^r eta = 1.

    Attributes:
        shape: Piecewise-constant profile of eta
        m0: Vanishing moment count
        support_radius: r
        half_mass: integral of eta over [0, 1/2]
        grid: Grid the atom is placed on
        condition: Condition number of the moment correction
    """

    shape: CellProfile
    m0: int
    support_radius: float
    half_mass: float
    grid: DyadicGrid
    condition: float = 1.0

    @property
    def max_level(self) -> int:
        return self.shape.max_level(self.grid)

    @property
    def profile(self) -> SampledFunction:
        return place_profile(self.grid, self.shape, 0)

    def check_level(self, level: int, what: str = 'atom'):
        if level > self.max_level:
            raise DomainError(
                f"{what} needs dilation level {level} but the grid resolves atoms only up to "
                f"{self.max_level} (j_max={self.grid.j_max})")

    def add_copies(self, samples: np.ndarray, level: int, centers: np.ndarray,
                   weights: np.ndarray):
        """
        Add weights[i] * eta(2^level (x - centers[i])) to a sample array in place.

        Raises:
            DomainError: On unresolvable level or misaligned/out-of-window centers
        """
        centers = np.asarray(centers, dtype=float)
        weights = np.broadcast_to(np.asarray(weights, dtype=float), centers.shape)
        if centers.size == 0:
            return
        self.check_level(level)
        grid = self.grid
        width = self.shape.grid_cells(grid, level)
        block = np.repeat(self.shape.values, width)
        lefts = np.ldexp(centers - grid.x_lo - math.ldexp(self.support_radius, -level), grid.j_max)
        starts = np.rint(lefts).astype(np.int64)
        if np.any(starts != lefts):
            raise DomainError(f"atom centers at level {level} are not grid aligned")
        if starts.min() < 0 or starts.max() + block.size > grid.n_points:
            raise DomainError(f"atoms at level {level} leave the window [{grid.x_lo}, {grid.x_hi})")
        index = starts[:, None] + np.arange(block.size)[None, :]
        np.add.at(samples, index, weights[:, None] * block[None, :])


def build_atom(m0: int = DEFAULT_ATOM_M0, support_radius: float = ATOM_SUPPORT_RADIUS,
               grid: Optional[DyadicGrid] = None, cells: int = DEFAULT_ATOM_CELLS) -> Atom:
    """
    Build the odd atom: the (m0+1)-th bump derivative (m0 even) averaged over cells.

    Odd moments up to m0 are cancelled by a least-norm correction that keeps the
    profile antisymmetric; even moments vanish by oddness.

    Args:
        m0: Even vanishing-moment count
        support_radius: Power of two <= 2^-5
        grid: Grid to place the atom on
        cells: Reference cells across the support

    Returns:
        The normalized atom (half_mass = 1/2)

    Raises:
        ConfigurationError: On odd m0 or an invalid radius
        ConstructionError: If the correction is ill-conditioned or cancels the atom
    """
    if grid is None:
        raise ConfigurationError('grid', "an atom needs a grid")
    if not isinstance(m0, (int, np.integer)) or m0 < 0 or m0 % 2:
        raise ConfigurationError('m0', f"need an even integer >= 0 so that m0+1 is odd, got {m0!r}")
    if not (0 < support_radius <= ATOM_SUPPORT_RADIUS) or not math.log2(support_radius).is_integer():
        raise ConfigurationError(
            'atom_support', f"need a power of two <= {ATOM_SUPPORT_RADIUS}, got {support_radius}")
    odd_degrees = list(range(1, m0 + 1, 2))
    if len(odd_degrees) >= cells // 2:
        raise ConfigurationError(
            'm0', f"{len(odd_degrees)} odd moment conditions need more than {cells} cells")

    shape, condition = bump_derivative_profile(m0 + 1, support_radius, cells, odd_degrees)
    values = 0.5 * (shape.values - shape.values[::-1])
    half = float(np.sum(values[cells // 2:])) * shape.cell_width
    if abs(half) <= 1e-300:
        raise ConstructionError("atom has zero mass on the positive half", condition)
    shape = CellProfile(values * (0.5 / half), support_radius, shape.cell_exponent)
    half_mass = float(np.sum(shape.values[cells // 2:])) * shape.cell_width
    if shape.cell_exponent > grid.j_max:
        raise ConfigurationError('j_max', f"atom cells need j_max >= {shape.cell_exponent}")
    logger.debug("atom m0=%d r=%g half_mass=%.17g moments=%s",
                 m0, support_radius, half_mass, shape.moments(max(m0, 1)))
    return Atom(shape, int(m0), support_radius, half_mass, grid, condition)


# --- smooth-atom sums -------------------------------------------------------

@dataclass(frozen=True)
class SmoothAtomFamily:
    """
    Admissible data for one smooth-atom sum g_m.

    points[l] are 2^{m-l}-separated positions in [0, 1]; coefficients[l] has the
    same length with entries in [-1, 1].
    """

    m: int
    points: Mapping[int, Tuple[float, ...]]
    coefficients: Mapping[int, Tuple[float, ...]]

    @property
    def levels(self) -> Tuple[int, ...]:
        return tuple(sorted(self.points))

    def validate(self):
        if len(self.points) < 2 ** self.m:
            raise DomainError(
                f"family needs at least 2^m = {2 ** self.m} levels, got {len(self.points)}")
        for l in self.levels:
            pts = np.asarray(self.points[l], dtype=float)
            coeffs = np.asarray(self.coefficients.get(l, ()), dtype=float)
            if l < self.m:
                raise DomainError(f"level {l} is below m = {self.m}")
            if pts.shape != coeffs.shape:
                raise DomainError(f"level {l}: {pts.size} points but {coeffs.size} coefficients")
            if np.any(np.abs(coeffs) > 1):
                raise DomainError(f"level {l}: coefficients must satisfy |a| <= 1")
            if np.any((pts < 0) | (pts > 1)):
                raise DomainError(f"level {l}: points must lie in [0, 1]")
            gaps = np.diff(np.sort(pts))
            if np.any(gaps < math.ldexp(1.0, self.m - l)):
                raise DomainError(f"level {l}: points are not 2^(m-l) = 2^{self.m - l} separated")


def smooth_atom_sum(family: SmoothAtomFamily, s: float, atom: Atom) -> SampledFunction:
    """
    g_m = sum over levels l of 2^{-ls} sum_nu a_{l,nu} eta(2^l (x - x_{l,nu})).

    Raises:
        DomainError: If the family is not admissible or a level is unresolvable
    """
    family.validate()
    samples = np.zeros(atom.grid.n_points)
    for l in family.levels:
        weights = np.asarray(family.coefficients[l], dtype=float) * 2.0 ** (-l * s)
        atom.add_copies(samples, l, np.asarray(family.points[l], dtype=float), weights)
    return SampledFunction(atom.grid, samples)


def aggregate_smooth_atoms(families: Sequence[SmoothAtomFamily], betas: Sequence[float],
                           s: float, atom: Atom) -> SampledFunction:
    """g = sum_m beta_m g_m over families with pairwise disjoint level sets."""
    if len(families) != len(betas):
        raise ConfigurationError('betas', f"{len(betas)} weights for {len(families)} families")
    seen: set = set()
    for family in families:
        overlap = seen.intersection(family.levels)
        if overlap:
            raise DomainError(f"families share levels {sorted(overlap)}")
        seen.update(family.levels)
    total = SampledFunction.zeros(atom.grid)
    for family, beta in zip(families, betas):
        total = total + smooth_atom_sum(family, s, atom) * beta
    return total


def interval_function_norm(family: SmoothAtomFamily, p: float, q: float,
                           grid: DyadicGrid) -> float:
    """
    ||(sum_l |sum_nu 1_{I_{l,nu}}|^q)^{1/q}||_p with I_{l,nu} = [x - 2^{-l-1}, x + 2^{-l-1}).

    Intervals are clipped to the window.
    """
    accum = np.zeros(grid.n_points)
    for l in family.levels:
        if l + 1 > grid.j_max:
            raise DomainError(f"intervals at level {l} are not resolvable at j_max={grid.j_max}")
        edges = np.zeros(grid.n_points + 1)
        half = math.ldexp(1.0, -l - 1)
        for x in family.points[l]:
            edges[grid.index_of(max(x - half, grid.x_lo))] += 1
            edges[grid.index_of(min(x + half, grid.x_hi))] -= 1
        counts = np.cumsum(edges[:-1])
        accum += np.abs(counts) ** q
    return lp_norm_values(accum ** (1.0 / q), grid.delta, p)


def random_smooth_atom_family(rng: np.random.Generator, m: int, levels: Sequence[int],
                              density: float = 0.5) -> SmoothAtomFamily:
    """
    Random admissible family: points on the lattice 2^{m-l}(nu + 1/2) inside (0, 1),
    each kept with the given probability, with uniform coefficients in [-1, 1].
    """
    points: Dict[int, Tuple[float, ...]] = {}
    coefficients: Dict[int, Tuple[float, ...]] = {}
    for l in sorted(levels):
        step = max(l - m, 0)
        lattice = np.ldexp(2 * np.arange(1 << step) + 1.0, -step - 1)
        keep = rng.random(lattice.size) < density
        if not np.any(keep):
            keep[rng.integers(lattice.size)] = True
        chosen = lattice[keep]
        points[l] = tuple(float(x) for x in chosen)
        coefficients[l] = tuple(float(a) for a in rng.uniform(-1.0, 1.0, chosen.size))
    return SmoothAtomFamily(m, points, coefficients)


# --- rescaled-atom family (polynomial growth) -------------------------------

def _levels_field(levels) -> Tuple[int, ...]:
    return tuple(sorted({int(k) for k in levels}))


def _format_ints(values) -> str:
    return ",".join(str(v) for v in values)


def _parse_ints(raw: str, key: str) -> Tuple[int, ...]:
    try:
        return tuple(int(v) for v in raw.split(',') if v.strip())
    except ValueError:
        raise ConfigurationError(key, f"expected comma-separated integers, got {raw!r}") from None


def _format_signs(signs: SignAssignment) -> str:
    return ",".join(f"{j}:{'+' if v > 0 else '-'}" for j, v in sorted(signs.signs.items()))


def _parse_signs(record: Mapping[str, str]) -> SignAssignment:
    signs = {}
    for item in record.get('signs', '').split(','):
        if not item.strip():
            continue
        level, _, sign = item.partition(':')
        if sign.strip() not in ('+', '-'):
            raise ConfigurationError('signs', f"bad sign entry {item!r}")
        signs[int(level)] = 1 if sign.strip() == '+' else -1
    seed = _parse_ints(record['seed'], 'seed') if record.get('seed') else None
    return SignAssignment(signs, seed)


def _require(record: Mapping[str, str], key: str) -> str:
    if key not in record:
        raise ConfigurationError(key, "missing from spec record")
    return record[key]


@dataclass(frozen=True)
class Section5Spec:
    """
    Rescaled-atom family f_t = sum_n alpha_n f_{n,t}.

    Attributes:
        levels: Levels k of the frequency set A (2^k in A)
        N: Size parameter, normally 2^N <= #A < 2^{N+1}
        s, q: Smoothness and fine index
        alphas: alpha_0 .. alpha_N
        signs: Rademacher signs r_k on the levels
    """

    levels: Tuple[int, ...]
    N: int
    s: float
    q: float
    alphas: Tuple[float, ...]
    signs: SignAssignment

    def __post_init__(self):
        object.__setattr__(self, 'levels', _levels_field(self.levels))
        object.__setattr__(self, 'alphas', tuple(float(a) for a in self.alphas))
        if not self.levels:
            raise ConfigurationError('levels', "need at least one level")
        if self.levels[0] < 0:
            raise ConfigurationError('levels', "levels must be >= 0")
        if self.N < 0:
            raise ConfigurationError('N', f"must be >= 0, got {self.N}")
        if len(self.alphas) != self.N + 1:
            raise ConfigurationError(
                'alphas', f"need N+1 = {self.N + 1} values, got {len(self.alphas)}")
        self.signs.check_levels(self.levels)

    @property
    def cardinality_matches(self) -> bool:
        """Whether 2^N <= #A < 2^{N+1}."""
        return 2 ** self.N <= len(self.levels) < 2 ** (self.N + 1)

    @classmethod
    def top_only(cls, levels: Sequence[int], N: int, s: float, q: float,
                 signs: SignAssignment) -> 'Section5Spec':
        """alpha_N = 1 and all other alphas zero."""
        alphas = [0.0] * (N + 1)
        alphas[N] = 1.0
        return cls(tuple(levels), N, s, q, tuple(alphas), signs)

    @classmethod
    def equal_weights(cls, levels: Sequence[int], N: int, s: float, q: float,
                      signs: SignAssignment) -> 'Section5Spec':
        """alpha_n = 1 for n = 1..N and alpha_0 = 0."""
        return cls(tuple(levels), N, s, q, (0.0,) + (1.0,) * N, signs)

    def to_record(self) -> Dict[str, str]:
        record = {
            'family': 'section5',
            'levels': _format_ints(self.levels),
            'N': str(self.N),
            's': repr(self.s),
            'q': repr(self.q),
            'alphas': ",".join(repr(a) for a in self.alphas),
            'signs': _format_signs(self.signs),
        }
        if self.signs.seed is not None:
            record['seed'] = _format_ints(self.signs.seed)
        return record

    @classmethod
    def from_record(cls, record: Mapping[str, str]) -> 'Section5Spec':
        if record.get('family', 'section5') != 'section5':
            raise ConfigurationError('family', f"expected section5, got {record['family']!r}")
        try:
            alphas = tuple(float(a) for a in _require(record, 'alphas').split(','))
            return cls(_parse_ints(_require(record, 'levels'), 'levels'),
                       int(_require(record, 'N')), float(_require(record, 's')),
                       float(_require(record, 'q')), alphas, _parse_signs(record))
        except ValueError as exc:
            raise ConfigurationError(None, f"bad section5 record: {exc}") from None


def eta_translate(atom: Atom, k: int, n: int, mu: int) -> SampledFunction:
    """eta_{k,n,mu}(x) = eta(2^{k+n}(x - 2^-k mu - 2^-k-1)), centered in I_{k,mu}."""
    samples = np.zeros(atom.grid.n_points)
    center = math.ldexp(2 * mu + 1, -k - 1)
    atom.add_copies(samples, k + n, np.array([center]), np.array([1.0]))
    return SampledFunction(atom.grid, samples)


def section5_coefficient(atom: Atom, k: int, n: int, mu: int,
                         nu: Optional[int] = None) -> float:
    """2^k <eta_{k,n,nu}, h_{k,mu}> (nu defaults to mu); equals -2^{1-n} half_mass on the diagonal."""
    eta = eta_translate(atom, k, n, mu if nu is None else nu)
    return math.ldexp(inner_product(eta, sample_haar(atom.grid, (k, mu))), k)


def section5_component(spec: Section5Spec, atom: Atom, n: int) -> SampledFunction:
    """f_{n,t} = 2^{-N/q} sum_k r_k 2^{-ks} Upsilon_{k,n}."""
    if not 0 <= n <= spec.N:
        raise DomainError(f"component n={n} outside [0, {spec.N}]")
    s, q = spec.s, spec.q
    samples = np.zeros(atom.grid.n_points)
    scale = 2.0 ** (-spec.N / q) * 2.0 ** (n * (-s + 1.0 / q))
    for k in spec.levels:
        atom.check_level(k + n, f"level {k} with n={n}")
        centers = np.ldexp(2 * np.arange(1 << k) + 1.0, -k - 1)
        weight = scale * spec.signs.sign(k) * 2.0 ** (-k * s)
        atom.add_copies(samples, k + n, centers, weight)
    return SampledFunction(atom.grid, samples)


def section5_function(spec: Section5Spec, atom: Atom) -> SampledFunction:
    """
    f_t = sum_n alpha_n f_{n,t} over the nonzero alphas.

    Raises:
        DomainError: If some level k + n (alpha_n != 0) exceeds the atom resolution
    """
    if not spec.cardinality_matches:
        logger.debug("section5 spec with #A=%d outside [2^%d, 2^%d)",
                     len(spec.levels), spec.N, spec.N + 1)
    total = np.zeros(atom.grid.n_points)
    for n, alpha in enumerate(spec.alphas):
        if alpha:
            total += alpha * section5_component(spec, atom, n).samples
    return SampledFunction(atom.grid, total)


def section5_max_feasible_N(levels: Sequence[int], atom: Atom) -> int:
    """Largest N with max(levels) + N resolvable by the atom."""
    return atom.max_level - max(levels)


# --- endpoint family --------------------------------------------------------

@dataclass(frozen=True)
class Section6Spec:
    """
    Endpoint family f_t = sum over l in L of r_l 2^{l/q'} H_l.

    Attributes:
        levels: Levels of the frequency set A
        N: Interval length
        intervals: Disjoint integer intervals (lo, hi) with hi - lo + 1 = N,
            each meeting the levels
        q: Fine index (s = -1/q')
        signs: Rademacher signs r_l on L = {b + N}
    """

    levels: Tuple[int, ...]
    N: int
    intervals: Tuple[Tuple[int, int], ...]
    q: float
    signs: SignAssignment

    def __post_init__(self):
        object.__setattr__(self, 'levels', _levels_field(self.levels))
        object.__setattr__(self, 'intervals',
                           tuple(sorted((int(lo), int(hi)) for lo, hi in self.intervals)))
        if self.N < 1:
            raise ConfigurationError('N', f"must be >= 1, got {self.N}")
        if not self.intervals:
            raise ConfigurationError('intervals', "need at least one interval")
        level_set = set(self.levels)
        previous_hi = None
        for lo, hi in self.intervals:
            if hi - lo + 1 != self.N:
                raise ConfigurationError('intervals', f"[{lo}, {hi}] does not have length N={self.N}")
            if previous_hi is not None and lo <= previous_hi:
                raise ConfigurationError('intervals', f"[{lo}, {hi}] overlaps its neighbour")
            if not level_set.intersection(range(lo, hi + 1)):
                raise ConfigurationError('intervals', f"[{lo}, {hi}] misses the level set")
            if hi < self.N + 3:
                raise ConfigurationError(
                    'intervals', f"largest element {hi} of [{lo}, {hi}] must be >= N+3 = {self.N + 3}")
            previous_hi = hi
        self.signs.check_levels(self.top_levels)

    @property
    def b(self) -> Tuple[int, ...]:
        return tuple(hi for _, hi in self.intervals)

    @property
    def top_levels(self) -> Tuple[int, ...]:
        """The set L = {b_kappa + N}."""
        return tuple(b + self.N for b in self.b)

    def members(self, index: int) -> Tuple[int, ...]:
        lo, hi = self.intervals[index]
        return tuple(j for j in self.levels if lo <= j <= hi)

    @property
    def z_average(self) -> float:
        """Average count of levels per interval."""
        return float(np.mean([len(self.members(i)) for i in range(len(self.intervals))]))

    def index_set(self) -> HaarSubset:
        """E = union over kappa of {(j, mu): j in A meets I_kappa, mu in 2^{j-b+N+2} Z, 1 <= mu < 2^j}."""
        grouped: Dict[int, List[np.ndarray]] = {}
        for i, b in enumerate(self.b):
            for j in self.members(i):
                step = 1 << (j - b + self.N + 2)
                grouped.setdefault(j, []).append(np.arange(step, 1 << j, step))
        return HaarSubset({j: np.concatenate(parts) for j, parts in grouped.items()})

    def to_record(self) -> Dict[str, str]:
        record = {
            'family': 'section6',
            'levels': _format_ints(self.levels),
            'N': str(self.N),
            'intervals': ",".join(f"{lo}-{hi}" for lo, hi in self.intervals),
            'q': repr(self.q),
            'signs': _format_signs(self.signs),
        }
        if self.signs.seed is not None:
            record['seed'] = _format_ints(self.signs.seed)
        return record

    @classmethod
    def from_record(cls, record: Mapping[str, str]) -> 'Section6Spec':
        if record.get('family', 'section6') != 'section6':
            raise ConfigurationError('family', f"expected section6, got {record['family']!r}")
        try:
            intervals = []
            for item in _require(record, 'intervals').split(','):
                lo, _, hi = item.strip().partition('-')
                intervals.append((int(lo), int(hi)))
            return cls(_parse_ints(_require(record, 'levels'), 'levels'),
                       int(_require(record, 'N')), tuple(intervals),
                       float(_require(record, 'q')), _parse_signs(record))
        except ValueError as exc:
            raise ConfigurationError(None, f"bad section6 record: {exc}") from None


def endpoint_block(atom: Atom, N: int, l: int) -> SampledFunction:
    """
    H_l = sum_{sigma=1..N} 2^-sigma sum_rho eta(2^{l-sigma}(x - 2^{2N+2-l} rho))
    over rho >= 1 with 2^{2N+2-l} rho < 1.
    """
    atom.check_level(l - 1, f"H_{l}")
    if l < 2 * N + 3:
        raise DomainError(f"H_{l} has no admissible rho (need l >= 2N+3 = {2 * N + 3})")
    rho = np.arange(1, 1 << (l - 2 * N - 2))
    centers = np.ldexp(rho.astype(float), 2 * N + 2 - l)
    samples = np.zeros(atom.grid.n_points)
    for sigma in range(1, N + 1):
        atom.add_copies(samples, l - sigma, centers, math.ldexp(1.0, -sigma))
    return SampledFunction(atom.grid, samples)


def section6_function(spec: Section6Spec, atom: Atom) -> Tuple[SampledFunction, HaarSubset]:
    """
    f_t = sum over l in L of r_l 2^{l/q'} H_l, together with the index set E.

    Raises:
        DomainError: If b_kappa + N - 1 exceeds the atom resolution
    """
    q_dual = spec.q / (spec.q - 1)
    total = np.zeros(atom.grid.n_points)
    for l in spec.top_levels:
        block = endpoint_block(atom, spec.N, l)
        total += spec.signs.sign(l) * 2.0 ** (l / q_dual) * block.samples
    return SampledFunction(atom.grid, total), spec.index_set()


def endpoint_intervals(levels: Sequence[int], N: int, max_top: int,
                       limit: Optional[int] = None) -> Tuple[Tuple[int, int], ...]:
    """
    Greedy disjoint length-N intervals meeting the levels, scanned from the top.

    Each interval's largest element b satisfies N+3 <= b <= max_top.

    Args:
        levels: Level set
        N: Interval length
        max_top: Largest admissible b (atom resolution minus N - 1)
        limit: Maximum number of intervals

    Returns:
        Intervals sorted ascending
    """
    level_set = set(levels)
    chosen: List[Tuple[int, int]] = []
    b = max_top
    while b >= N + 3 and (limit is None or len(chosen) < limit):
        lo = b - N + 1
        if level_set.intersection(range(lo, b + 1)):
            chosen.append((lo, b))
            b = lo - 1
        else:
            b -= 1
    return tuple(sorted(chosen))
