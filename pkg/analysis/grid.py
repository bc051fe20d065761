"""
Grid Module
Dyadic grids, exact sampling of Haar functions, quadrature inner products and L_p norms.

Functions are stored by their value on each grid cell [x_i, x_i + delta)
(left-endpoint convention), so every Haar function h_{j,mu} with j < j_max is
represented exactly and integrals of products of such functions are exact up
to summation roundoff. Sums use numpy's pairwise summation.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Tuple, Union

import numpy as np

from utils.config import MAX_GRID_POINTS, MAX_J_MAX, MIN_J_MAX
from .errors import ConfigurationError, DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DyadicGrid:
    """Uniform grid of spacing 2^-j_max covering the window [x_lo, x_hi)."""

    j_max: int
    x_lo: int
    x_hi: int

    def __post_init__(self):
        if not isinstance(self.j_max, (int, np.integer)) or isinstance(self.j_max, bool):
            raise ConfigurationError('j_max', f"must be an integer, got {self.j_max!r}")
        if not MIN_J_MAX <= self.j_max <= MAX_J_MAX:
            raise ConfigurationError(
                'j_max', f"must lie in [{MIN_J_MAX}, {MAX_J_MAX}], got {self.j_max}")
        if self.x_lo >= self.x_hi:
            raise ConfigurationError(
                'window', f"empty window [{self.x_lo}, {self.x_hi})")
        if (self.x_hi - self.x_lo) << self.j_max > MAX_GRID_POINTS:
            raise ConfigurationError(
                'window', f"{(self.x_hi - self.x_lo) << self.j_max} grid points "
                          f"exceed the limit {MAX_GRID_POINTS}")

    @property
    def n_points(self) -> int:
        return (self.x_hi - self.x_lo) << self.j_max

    @property
    def delta(self) -> float:
        return math.ldexp(1.0, -self.j_max)

    @property
    def points(self) -> np.ndarray:
        """Left endpoints of all cells (exact binary fractions)."""
        return self.x_lo + np.arange(self.n_points, dtype=float) * self.delta

    def index_of(self, x: float) -> int:
        """
        Cell index of a grid point.

        Args:
            x: A point of the form x_lo + i * delta

        Returns:
            The integer i

        Raises:
            DomainError: If x is not a grid point inside the window
        """
        scaled = math.ldexp(x - self.x_lo, self.j_max)
        if not float(scaled).is_integer():
            raise DomainError(f"{x} is not a point of the grid 2^-{self.j_max}Z")
        index = int(scaled)
        if not 0 <= index <= self.n_points:
            raise DomainError(f"{x} lies outside the window [{self.x_lo}, {self.x_hi})")
        return index

    def cells_per_unit(self, level: int) -> int:
        """Number of grid cells in a dyadic interval of length 2^-level."""
        if level > self.j_max:
            raise DomainError(f"level {level} is finer than the grid (j_max={self.j_max})")
        return 1 << (self.j_max - level)

    def describe(self) -> str:
        return f"{self.j_max} {self.x_lo} {self.x_hi}"


def make_grid(j_max: int, x_lo: int, x_hi: int) -> DyadicGrid:
    """
    Create a dyadic grid.

    Args:
        j_max: Resolution exponent, grid spacing is 2^-j_max
        x_lo: Left end of the window (integer)
        x_hi: Right end of the window (integer)

    Returns:
        The validated grid

    Raises:
        ConfigurationError: On out-of-range resolution, empty or oversized window
    """
    grid = DyadicGrid(int(j_max), int(x_lo), int(x_hi))
    logger.debug("grid j_max=%d window=[%d, %d) points=%d",
                 grid.j_max, grid.x_lo, grid.x_hi, grid.n_points)
    return grid


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Real function given by its (finite) value on every cell of a grid."""

    grid: DyadicGrid
    samples: np.ndarray

    def __post_init__(self):
        values = np.array(self.samples, dtype=float)
        if values.ndim != 1 or values.shape[0] != self.grid.n_points:
            raise DomainError(
                f"expected {self.grid.n_points} samples, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DomainError("samples contain NaN or Inf")
        values.setflags(write=False)
        object.__setattr__(self, 'samples', values)

    @classmethod
    def zeros(cls, grid: DyadicGrid) -> 'SampledFunction':
        return cls(grid, np.zeros(grid.n_points))

    @classmethod
    def from_callable(cls, grid: DyadicGrid,
                      fn: Callable[[np.ndarray], np.ndarray]) -> 'SampledFunction':
        """Sample a vectorized function at the left endpoints of the cells."""
        return cls(grid, fn(grid.points))

    def _check(self, other: 'SampledFunction'):
        if other.grid != self.grid:
            raise DomainError(f"grid mismatch: {self.grid} vs {other.grid}")

    def __add__(self, other: 'SampledFunction') -> 'SampledFunction':
        self._check(other)
        return SampledFunction(self.grid, self.samples + other.samples)

    def __sub__(self, other: 'SampledFunction') -> 'SampledFunction':
        self._check(other)
        return SampledFunction(self.grid, self.samples - other.samples)

    def __neg__(self) -> 'SampledFunction':
        return SampledFunction(self.grid, -self.samples)

    def __mul__(self, scalar: float) -> 'SampledFunction':
        return SampledFunction(self.grid, self.samples * float(scalar))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not np.any(self.samples)

    def support(self, tol: float = 0.0) -> Optional[Tuple[float, float]]:
        """
        Smallest interval [a, b) containing every cell with |value| > tol.

        Returns:
            (a, b) or None for the zero function
        """
        nonzero = np.flatnonzero(np.abs(self.samples) > tol)
        if nonzero.size == 0:
            return None
        delta = self.grid.delta
        return (self.grid.x_lo + nonzero[0] * delta,
                self.grid.x_lo + (nonzero[-1] + 1) * delta)


class HaarIndex(NamedTuple):
    """Index (j, mu) of h_{j,mu}; j = -1 is the indicator of [mu, mu+1)."""

    j: int
    mu: int

    def interval(self) -> Tuple[float, float]:
        """Support I_{j,mu} as a pair of floats (exact binary fractions)."""
        if self.j == -1:
            return float(self.mu), float(self.mu + 1)
        return math.ldexp(self.mu, -self.j), math.ldexp(self.mu + 1, -self.j)

    def midpoint(self) -> float:
        if self.j == -1:
            return self.mu + 0.5
        return math.ldexp(2 * self.mu + 1, -self.j - 1)

    def cell_range(self, grid: DyadicGrid) -> Tuple[int, int]:
        """
        Grid cells [start, stop) covered by the support.

        Raises:
            DomainError: If the two halves are not resolvable or the support
                leaves the window
        """
        if self.j < -1:
            raise DomainError(f"level {self.j} < -1 is not a Haar level")
        if self.j >= grid.j_max:
            raise DomainError(
                f"h_({self.j},{self.mu}) halves are not resolvable at j_max={grid.j_max}")
        level = max(self.j, 0)
        width = grid.cells_per_unit(level)
        start = self.mu * width - (grid.x_lo << grid.j_max)
        stop = start + width
        if start < 0 or stop > grid.n_points:
            raise DomainError(
                f"support of h_({self.j},{self.mu}) leaves the window "
                f"[{grid.x_lo}, {grid.x_hi})")
        return start, stop


def sample_haar(grid: DyadicGrid, idx: Union[HaarIndex, Tuple[int, int]]) -> SampledFunction:
    """
    Exact samples of a Haar function.

    Args:
        grid: Target grid
        idx: Haar index (j, mu)

    Returns:
        +1 on I^+, -1 on I^-, 0 elsewhere (+1 on [mu, mu+1) for j = -1)
    """
    idx = HaarIndex(*idx)
    start, stop = idx.cell_range(grid)
    samples = np.zeros(grid.n_points)
    if idx.j == -1:
        samples[start:stop] = 1.0
    else:
        mid = (start + stop) // 2
        samples[start:mid] = 1.0
        samples[mid:stop] = -1.0
    return SampledFunction(grid, samples)


def inner_product(f: SampledFunction, g: SampledFunction) -> float:
    """Quadrature inner product sum_i f_i g_i delta (exact for grid step functions)."""
    if f.grid != g.grid:
        raise DomainError(f"grid mismatch: {f.grid} vs {g.grid}")
    return float(np.sum(f.samples * g.samples)) * f.grid.delta


def lp_norm_values(values: np.ndarray, delta: float, p: float) -> float:
    """L_p norm of a cell-value array with cell width delta."""
    if not (p >= 1 and math.isfinite(p)):
        raise ConfigurationError('p', f"need 1 <= p < inf, got {p}")
    magnitudes = np.abs(values)
    if p == 2:
        total = np.sum(magnitudes * magnitudes)
    elif p == 1:
        total = np.sum(magnitudes)
    else:
        total = np.sum(magnitudes ** p)
    return float(total * delta) ** (1.0 / p)


def lp_norm(f: SampledFunction, p: float) -> float:
    """
    L_p norm (sum_i |f_i|^p delta)^(1/p).

    Raises:
        ConfigurationError: If p < 1 (quasi-norms are not supported)
    """
    return lp_norm_values(f.samples, f.grid.delta, p)
