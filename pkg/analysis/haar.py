"""
Haar Module
Haar analysis and synthesis, subset projections P_E, signed projections,
the dyadic sequence norm and density statistics of Haar frequency sets.

Coefficients use the normalization c_{j,mu} = 2^j <f, h_{j,mu}> for j >= 0 and
c_{-1,mu} = <f, 1_[mu, mu+1)>. Level sets are handled through their binary
logarithms: a frequency set A = {2^k} is passed around as the set of levels k.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigurationError, DomainError
from .grid import DyadicGrid, HaarIndex, SampledFunction, lp_norm_values

logger = logging.getLogger(__name__)

SeedLike = Union[int, Sequence[int]]


def _block_count(grid: DyadicGrid, j: int) -> int:
    return (grid.x_hi - grid.x_lo) << max(j, 0)


def _block_offset(grid: DyadicGrid, j: int) -> int:
    """Position mu of the first block at level j."""
    return grid.x_lo << max(j, 0)


def _check_level(grid: DyadicGrid, j: int):
    if j < -1:
        raise DomainError(f"level {j} < -1 is not a Haar level")
    if j > grid.j_max - 1:
        raise DomainError(
            f"level {j} is not resolvable at j_max={grid.j_max} (need j <= {grid.j_max - 1})")


class HaarSubset:
    """
    Finite set E of Haar indices (j >= 0) stored as sorted position arrays per level.

    The Haar frequency set HF(E) is the set of 2^j over the levels present.
    """

    def __init__(self, levels: Optional[Mapping[int, Iterable[int]]] = None):
        self._levels: Dict[int, np.ndarray] = {}
        for j, mus in (levels or {}).items():
            j = int(j)
            if j < 0:
                raise DomainError(f"Haar subsets only hold levels j >= 0, got {j}")
            if not isinstance(mus, np.ndarray):
                mus = np.fromiter(mus, dtype=np.int64)
            arr = np.unique(mus.astype(np.int64))
            if arr.size:
                arr.setflags(write=False)
                self._levels[j] = arr

    @classmethod
    def from_indices(cls, indices: Iterable[Tuple[int, int]]) -> 'HaarSubset':
        grouped: Dict[int, List[int]] = {}
        for j, mu in indices:
            grouped.setdefault(int(j), []).append(int(mu))
        return cls(grouped)

    @classmethod
    def full_levels(cls, levels: Iterable[int], x_lo: int = 0, x_hi: int = 1) -> 'HaarSubset':
        """All (j, mu) with j in levels and supp h_{j,mu} inside [x_lo, x_hi]."""
        return cls({j: np.arange(x_lo << j, x_hi << j, dtype=np.int64)
                    for j in levels})

    @property
    def levels(self) -> Tuple[int, ...]:
        return tuple(sorted(self._levels))

    @property
    def hf(self) -> frozenset:
        """Haar frequency set HF(E) = {2^j : E has an index at level j}."""
        return frozenset(1 << j for j in self._levels)

    def positions(self, j: int) -> np.ndarray:
        return self._levels.get(j, np.empty(0, dtype=np.int64))

    def indices(self) -> Iterator[HaarIndex]:
        for j in self.levels:
            for mu in self._levels[j]:
                yield HaarIndex(j, int(mu))

    def __len__(self) -> int:
        return int(sum(arr.size for arr in self._levels.values()))

    def __bool__(self) -> bool:
        return bool(self._levels)

    def __contains__(self, idx) -> bool:
        j, mu = idx
        arr = self._levels.get(j)
        if arr is None:
            return False
        pos = np.searchsorted(arr, mu)
        return bool(pos < arr.size and arr[pos] == mu)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HaarSubset):
            return NotImplemented
        return (self.levels == other.levels
                and all(np.array_equal(self._levels[j], other._levels[j]) for j in self.levels))

    def __repr__(self) -> str:
        return f"HaarSubset(levels={list(self.levels)}, size={len(self)})"

    def intersection(self, other: 'HaarSubset') -> 'HaarSubset':
        return HaarSubset({j: np.intersect1d(self._levels[j], other._levels[j])
                           for j in set(self._levels) & set(other._levels)})

    def union(self, other: 'HaarSubset') -> 'HaarSubset':
        merged = dict(self._levels)
        for j, arr in other._levels.items():
            merged[j] = np.union1d(merged[j], arr) if j in merged else arr
        return HaarSubset(merged)

    def difference(self, other: 'HaarSubset') -> 'HaarSubset':
        return HaarSubset({j: np.setdiff1d(arr, other.positions(j))
                           for j, arr in self._levels.items()})

    def restrict_levels(self, levels: Iterable[int]) -> 'HaarSubset':
        keep = set(levels)
        return HaarSubset({j: arr for j, arr in self._levels.items() if j in keep})

    def validate(self, grid: DyadicGrid):
        """Raise DomainError unless every index is resolvable and inside the window."""
        for j, arr in self._levels.items():
            _check_level(grid, j)
            offset = _block_offset(grid, j)
            if arr[0] < offset or arr[-1] >= offset + _block_count(grid, j):
                raise DomainError(
                    f"level {j} positions [{arr[0]}, {arr[-1]}] leave the window "
                    f"[{grid.x_lo}, {grid.x_hi})")

    def block_mask(self, grid: DyadicGrid, j: int) -> np.ndarray:
        """Boolean mask over the level-j blocks of the grid selecting this subset."""
        mask = np.zeros(_block_count(grid, j), dtype=bool)
        arr = self._levels.get(j)
        if arr is not None:
            mask[arr - _block_offset(grid, j)] = True
        return mask

    def describe(self) -> str:
        return ";".join(f"{j}:{self._levels[j].size}" for j in self.levels)


@dataclass(frozen=True)
class SignAssignment:
    """Rademacher signs r_j in {+1, -1} per level, with the seed they were drawn from."""

    signs: Mapping[int, int]
    seed: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        clean = {}
        for j, value in dict(self.signs).items():
            if value not in (1, -1):
                raise DomainError(f"sign for level {j} must be +1 or -1, got {value}")
            clean[int(j)] = int(value)
        object.__setattr__(self, 'signs', clean)

    @classmethod
    def draw(cls, levels: Iterable[int], seed: SeedLike) -> 'SignAssignment':
        """
        Draw independent uniform signs for the given levels.

        Args:
            levels: Levels needing a sign (drawn in ascending order)
            seed: Integer or integer sequence fed to numpy.random.default_rng

        Returns:
            A reproducible sign assignment
        """
        ordered = sorted(set(levels))
        rng = np.random.default_rng(seed)
        values = rng.integers(0, 2, size=len(ordered)) * 2 - 1
        seed_tuple = (seed,) if isinstance(seed, (int, np.integer)) else tuple(seed)
        return cls({j: int(v) for j, v in zip(ordered, values)},
                   tuple(int(s) for s in seed_tuple))

    @classmethod
    def constant(cls, levels: Iterable[int], value: int = 1) -> 'SignAssignment':
        return cls({j: value for j in levels})

    def sign(self, j: int) -> int:
        try:
            return self.signs[j]
        except KeyError:
            raise DomainError(f"no sign assigned to level {j}") from None

    def flipped(self, j: int) -> 'SignAssignment':
        signs = dict(self.signs)
        signs[j] = -self.sign(j)
        return SignAssignment(signs, self.seed)

    def check_levels(self, levels: Iterable[int]):
        missing = [j for j in levels if j not in self.signs]
        if missing:
            raise DomainError(f"no sign assigned to levels {missing}")

    def check_covers(self, E: HaarSubset):
        self.check_levels(E.levels)


class HaarCoefficients:
    """
    Haar coefficients of a function on a grid.

    Stored densely per level (one value per dyadic block of the window) and
    exposed as a sparse map HaarIndex -> value without zero entries.
    """

    def __init__(self, grid: DyadicGrid, levels: Mapping[int, np.ndarray]):
        self.grid = grid
        self._levels: Dict[int, np.ndarray] = {}
        for j, values in levels.items():
            _check_level(grid, j)
            arr = np.array(values, dtype=float)
            if arr.shape != (_block_count(grid, j),):
                raise DomainError(
                    f"level {j} needs {_block_count(grid, j)} block values, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise DomainError(f"level {j} coefficients contain NaN or Inf")
            arr.setflags(write=False)
            self._levels[int(j)] = arr

    @classmethod
    def from_entries(cls, grid: DyadicGrid,
                     entries: Mapping[Tuple[int, int], float]) -> 'HaarCoefficients':
        dense: Dict[int, np.ndarray] = {}
        for (j, mu), value in entries.items():
            _check_level(grid, j)
            if j not in dense:
                dense[j] = np.zeros(_block_count(grid, j))
            pos = mu - _block_offset(grid, j)
            if not 0 <= pos < dense[j].size:
                raise DomainError(f"support of h_({j},{mu}) leaves the window "
                                  f"[{grid.x_lo}, {grid.x_hi})")
            dense[j][pos] = value
        return cls(grid, dense)

    @property
    def levels(self) -> Tuple[int, ...]:
        return tuple(sorted(self._levels))

    def level_values(self, j: int) -> np.ndarray:
        """Dense block values at level j (zeros if the level is absent)."""
        if j in self._levels:
            return self._levels[j]
        return np.zeros(_block_count(self.grid, j))

    def items(self) -> Iterator[Tuple[HaarIndex, float]]:
        for j in self.levels:
            values = self._levels[j]
            offset = _block_offset(self.grid, j)
            for pos in np.flatnonzero(values):
                yield HaarIndex(j, int(pos) + offset), float(values[pos])

    @property
    def entries(self) -> Dict[HaarIndex, float]:
        return dict(self.items())

    def __getitem__(self, idx) -> float:
        j, mu = idx
        if j not in self._levels:
            return 0.0
        pos = mu - _block_offset(self.grid, j)
        values = self._levels[j]
        return float(values[pos]) if 0 <= pos < values.size else 0.0

    def __len__(self) -> int:
        return int(sum(np.count_nonzero(v) for v in self._levels.values()))

    def restrict(self, E: HaarSubset) -> 'HaarCoefficients':
        """Keep only the entries indexed by E (levels outside E are dropped)."""
        E.validate(self.grid)
        return HaarCoefficients(self.grid, {
            j: np.where(E.block_mask(self.grid, j), self.level_values(j), 0.0)
            for j in E.levels})

    def scaled_by_level(self, factors: Mapping[int, float]) -> 'HaarCoefficients':
        return HaarCoefficients(self.grid, {
            j: values * factors.get(j, 1.0) for j, values in self._levels.items()})

    def energy(self) -> float:
        """Squared L_2 norm of the synthesized function (Parseval)."""
        total = 0.0
        for j, values in self._levels.items():
            total += math.ldexp(float(np.sum(values * values)), -max(j, 0))
        return total

    def to_text(self) -> str:
        """Serialize as '# grid j_max x_lo x_hi' followed by 'j mu value' lines."""
        lines = [f"# grid {self.grid.describe()}"]
        lines.extend(f"{idx.j} {idx.mu} {value!r}" for idx, value in self.items())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> 'HaarCoefficients':
        from .grid import make_grid

        grid = None
        entries: Dict[Tuple[int, int], float] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith('#'):
                parts = line[1:].split()
                if parts and parts[0] == 'grid':
                    if len(parts) != 4:
                        raise ConfigurationError('grid', f"line {number}: expected 'grid j_max x_lo x_hi'")
                    grid = make_grid(int(parts[1]), int(parts[2]), int(parts[3]))
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ConfigurationError(None, f"line {number}: expected 'j mu value', got {line!r}")
            try:
                entries[(int(parts[0]), int(parts[1]))] = float(parts[2])
            except ValueError as exc:
                raise ConfigurationError(None, f"line {number}: {exc}") from None
        if grid is None:
            raise ConfigurationError('grid', "missing '# grid j_max x_lo x_hi' header")
        return cls.from_entries(grid, entries)


def analyze(f: SampledFunction, levels: Optional[Iterable[int]] = None,
            window: Optional[Tuple[float, float]] = None) -> HaarCoefficients:
    """
    Haar coefficients of f by the block-sum cascade.

    Block sums at level l are formed pairwise from level l+1, so every
    coefficient is a difference of two exactly tree-summed half blocks.

    Args:
        f: Function to analyze
        levels: Levels j (>= -1) to compute; defaults to -1 .. j_max-1
        window: Optional interval (a, b); only indices with support inside it are kept

    Returns:
        Coefficients c_{j,mu} for the requested levels

    Raises:
        DomainError: If a level is not resolvable
    """
    grid = f.grid
    wanted = sorted(set(range(-1, grid.j_max) if levels is None else (int(j) for j in levels)))
    for j in wanted:
        _check_level(grid, j)
    if not wanted:
        return HaarCoefficients(grid, {})

    needed = {j + 1 if j >= 0 else 0 for j in wanted}
    block_sums: Dict[int, np.ndarray] = {}
    current = f.samples
    for level in range(grid.j_max, min(needed) - 1, -1):
        if level < grid.j_max:
            current = current[0::2] + current[1::2]
        if level in needed:
            block_sums[level] = current

    result: Dict[int, np.ndarray] = {}
    for j in wanted:
        if j == -1:
            values = np.ldexp(block_sums[0], -grid.j_max)
        else:
            halves = block_sums[j + 1]
            values = np.ldexp(halves[0::2] - halves[1::2], j - grid.j_max)
        if window is not None:
            values = values * _window_mask(grid, j, window)
        result[j] = values
    return HaarCoefficients(grid, result)


def _window_mask(grid: DyadicGrid, j: int, window: Tuple[float, float]) -> np.ndarray:
    level = max(j, 0)
    lo = math.ceil(math.ldexp(window[0] - grid.x_lo, level))
    hi = math.floor(math.ldexp(window[1] - grid.x_lo, level))
    mask = np.zeros(_block_count(grid, j))
    mask[max(lo, 0):max(hi, 0)] = 1.0
    return mask


def synthesize(coeffs: HaarCoefficients) -> SampledFunction:
    """
    Sum of c_{j,mu} h_{j,mu} on the coefficient grid (inverse cascade).

    Returns:
        The synthesized function; zero for empty coefficients
    """
    grid = coeffs.grid
    if not coeffs.levels:
        return SampledFunction.zeros(grid)
    current = coeffs.level_values(-1).copy()
    for j in range(0, grid.j_max):
        current = np.repeat(current, 2)
        if j in coeffs.levels:
            values = coeffs.level_values(j)
            current[0::2] += values
            current[1::2] -= values
    return SampledFunction(grid, current)


def project(f: SampledFunction, E: HaarSubset) -> SampledFunction:
    """P_E f = sum over E of 2^j <f, h_{j,mu}> h_{j,mu}."""
    E.validate(f.grid)
    return synthesize(analyze(f, E.levels).restrict(E))


def signed_project(f: SampledFunction, E: HaarSubset, signs: SignAssignment) -> SampledFunction:
    """
    Signed projection sum over E of r_j 2^j <f, h_{j,mu}> h_{j,mu}.

    Equals project(f, E+) - project(f, E-) for (E+, E-) = split_by_sign(E, signs).

    Raises:
        DomainError: If a level of E has no sign
    """
    signs.check_covers(E)
    E.validate(f.grid)
    coeffs = analyze(f, E.levels).restrict(E)
    return synthesize(coeffs.scaled_by_level({j: float(signs.sign(j)) for j in E.levels}))


def split_by_sign(E: HaarSubset, signs: SignAssignment) -> Tuple[HaarSubset, HaarSubset]:
    """Split E into (E+, E-) according to the sign of each level."""
    signs.check_covers(E)
    plus = E.restrict_levels(j for j in E.levels if signs.sign(j) == 1)
    minus = E.restrict_levels(j for j in E.levels if signs.sign(j) == -1)
    return plus, minus


def _check_exponents(p: float, q: float):
    for key, value in (('p', p), ('q', q)):
        if not (value >= 1 and math.isfinite(value)):
            raise ConfigurationError(key, f"need 1 <= {key} < inf, got {value}")


def sequence_norm(coeffs: HaarCoefficients, p: float, q: float, s: float) -> float:
    """
    Dyadic sequence norm ||(sum_j 2^{jsq} |sum_mu c_{j,mu} 1_{j,mu}|^q)^{1/q}||_p.

    1_{j,mu} is the indicator of supp h_{j,mu} for every j >= -1. Same-level
    supports are disjoint, so each level sum is the block value repeated over
    its block.

    Raises:
        ConfigurationError: If p or q is outside [1, inf)
    """
    _check_exponents(p, q)
    if not math.isfinite(s):
        raise ConfigurationError('s', f"must be finite, got {s}")
    grid = coeffs.grid
    accum = np.zeros(grid.n_points)
    for j in coeffs.levels:
        values = np.abs(coeffs.level_values(j))
        if not np.any(values):
            continue
        width = grid.n_points // values.size
        weight = 2.0 ** (j * s * q)
        accum += weight * np.repeat(values, width) ** q
    return lp_norm_values(accum ** (1.0 / q), grid.delta, p)


class DensityStats(NamedTuple):
    z_n: Optional[int]
    z_bar: Optional[int]
    z_under: Optional[int]


def _window_counts(levels: np.ndarray, centers: np.ndarray, radius: int) -> np.ndarray:
    upper = np.searchsorted(levels, centers + radius, side='right')
    lower = np.searchsorted(levels, centers - radius, side='left')
    return upper - lower


def density_stats(A: Iterable[int], N: Optional[int] = None) -> DensityStats:
    """
    Density statistics of a level set A (the binary logarithms of the frequencies).

    Z_N = max over integers k of #{n in A : |n - k| <= N}; Z_bar and Z_under are
    the max over all integers and the min over n in A of #{k in A : |k - n| <= log2 #A}.

    Args:
        A: Nonempty set of integer levels
        N: Window radius for Z_N; when omitted only Z_bar and Z_under are computed

    Returns:
        DensityStats; z_bar and z_under are None when #A < 2 and N is given

    Raises:
        DomainError: If A is empty, N < 1, or #A < 2 without N
    """
    levels = np.unique(np.asarray(list(A), dtype=np.int64))
    if levels.size == 0:
        raise DomainError("density statistics need a nonempty level set")

    z_n = None
    if N is not None:
        if N < 1:
            raise DomainError(f"Z_N needs N >= 1, got {N}")
        z_n = int(np.max(_window_counts(levels, levels + N, N)))

    if levels.size < 2:
        if N is None:
            raise DomainError("Z_bar and Z_under need #A >= 2")
        return DensityStats(z_n, None, None)

    # |k - n| <= log2 #A for integers is |k - n| <= floor(log2 #A)
    radius = int(levels.size).bit_length() - 1
    z_bar = int(np.max(_window_counts(levels, levels + radius, radius)))
    z_under = int(np.min(_window_counts(levels, levels, radius)))
    return DensityStats(z_n, z_bar, z_under)
