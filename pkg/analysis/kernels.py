"""
Kernels Module
Piecewise-constant reference profiles built from the smooth bump exp(-1/(1-u^2)).

A profile lives on 2^c-wide reference cells over (-radius, radius); its value on
each cell is the exact cell average of a bump derivative. Dilations by 2^level
stay piecewise constant with cell width 2^-(c+level), so they are represented
exactly on any grid with j_max >= c + level.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence, Tuple

import numpy as np
import sympy
from numpy.polynomial import legendre

from utils.config import MAX_MOMENT_CONDITION
from .errors import ConstructionError, DomainError
from .grid import DyadicGrid

logger = logging.getLogger(__name__)

_GAUSS_NODES, _GAUSS_WEIGHTS = legendre.leggauss(32)


@lru_cache(maxsize=None)
def bump_derivative(order: int) -> Callable[[np.ndarray], np.ndarray]:
    """
    Closed-form derivative of exp(-1/(1-u^2)) as a vectorized function.

    Args:
        order: Derivative order (0 gives the bump itself)

    Returns:
        Function of u that is zero outside (-1, 1)
    """
    u = sympy.Symbol('u', real=True)
    expr = sympy.diff(sympy.exp(-1 / (1 - u ** 2)), u, order)
    compiled = sympy.lambdify(u, expr, 'numpy')

    def evaluate(points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        out = np.zeros_like(points)
        inside = np.abs(points) < 1
        with np.errstate(all='ignore'):
            out[inside] = compiled(points[inside])
        out[~np.isfinite(out)] = 0.0
        return out

    return evaluate


def derivative_cell_averages(order: int, edges: np.ndarray) -> np.ndarray:
    """
    Averages of the order-th bump derivative over the cells [edges[i], edges[i+1]].

    For order >= 1 the average is a difference quotient of the (order-1)-th
    derivative, so no quadrature is involved.
    """
    edges = np.asarray(edges, dtype=float)
    widths = np.diff(edges)
    if order >= 1:
        antiderivative = bump_derivative(order - 1)(edges)
        return np.diff(antiderivative) / widths
    mids = 0.5 * (edges[:-1] + edges[1:])
    nodes = mids[:, None] + 0.5 * widths[:, None] * _GAUSS_NODES[None, :]
    return 0.5 * (bump_derivative(0)(nodes) @ _GAUSS_WEIGHTS)


def legendre_cell_integrals(degrees: Sequence[int], edges: np.ndarray) -> np.ndarray:
    """Matrix M[d, i] = integral of the Legendre polynomial P_degrees[d] over cell i."""
    rows = []
    for degree in degrees:
        primitive = legendre.Legendre.basis(degree).integ()
        rows.append(np.diff(primitive(edges)))
    return np.array(rows)


def correct_moments(values: np.ndarray, edges: np.ndarray,
                    degrees: Sequence[int]) -> Tuple[np.ndarray, float]:
    """
    Least-norm change of cell values that cancels the given moments exactly.

    Args:
        values: Cell values on [-1, 1] coordinates
        edges: Cell edges in [-1, 1]
        degrees: Moment degrees to cancel

    Returns:
        Corrected values and the condition number of the Gram matrix

    Raises:
        ConstructionError: If the moment system is ill-conditioned
    """
    if not degrees:
        return values, 1.0
    moments = legendre_cell_integrals(degrees, edges)
    gram = moments @ moments.T
    condition = float(np.linalg.cond(gram))
    if not condition < MAX_MOMENT_CONDITION:
        raise ConstructionError(
            f"moment correction for degrees {list(degrees)} on {values.size} cells is ill-conditioned",
            condition)
    correction = moments.T @ np.linalg.solve(gram, moments @ values)
    corrected = values - correction
    # one refinement step takes the residual down to rounding level
    corrected = corrected - moments.T @ np.linalg.solve(gram, moments @ corrected)
    return corrected, condition


@dataclass(frozen=True, eq=False)
class CellProfile:
    """Function on (-radius, radius) that is constant on reference cells of width 2^-cell_exponent."""

    values: np.ndarray
    radius: float
    cell_exponent: int

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        expected = 2 * self.radius * 2.0 ** self.cell_exponent
        if values.ndim != 1 or values.size != expected:
            raise DomainError(f"profile needs {expected:g} cell values, got {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def cells(self) -> int:
        return self.values.size

    @property
    def cell_width(self) -> float:
        return math.ldexp(1.0, -self.cell_exponent)

    @property
    def edges(self) -> np.ndarray:
        return -self.radius + np.arange(self.cells + 1) * self.cell_width

    def scaled(self, factor: float) -> 'CellProfile':
        return CellProfile(self.values * factor, self.radius, self.cell_exponent)

    def integral(self) -> float:
        return float(np.sum(self.values)) * self.cell_width

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.values))) * self.cell_width

    def moments(self, max_degree: int) -> np.ndarray:
        """Exact integrals of x^n times the profile for n = 0..max_degree."""
        edges = self.edges
        return np.array([
            math.fsum(self.values * np.diff(edges ** (n + 1))) / (n + 1)
            for n in range(max_degree + 1)])

    def max_level(self, grid: DyadicGrid) -> int:
        """Largest dilation level whose cells are still whole grid cells."""
        return grid.j_max - self.cell_exponent

    def grid_cells(self, grid: DyadicGrid, level: int) -> int:
        """Grid cells per reference cell after dilation by 2^level."""
        if level > self.max_level(grid):
            raise DomainError(
                f"dilation level {level} is not resolvable at j_max={grid.j_max} "
                f"(maximum {self.max_level(grid)})")
        if level < -self.cell_exponent:
            raise DomainError(f"dilation level {level} is coarser than a unit cell")
        return 1 << (grid.j_max - self.cell_exponent - level)

    def fourier(self, xi: np.ndarray) -> np.ndarray:
        """Fourier transform integral of profile(x) exp(-2 pi i x xi) dx."""
        xi = np.asarray(xi, dtype=float)
        edges = self.edges
        mids = 0.5 * (edges[:-1] + edges[1:])
        phases = np.exp(-2j * np.pi * np.outer(xi, mids))
        return (phases @ self.values) * self.cell_width * np.sinc(self.cell_width * xi)


def bump_derivative_profile(order: int, radius: float, cells: int,
                            moment_degrees: Sequence[int] = ()) -> Tuple[CellProfile, float]:
    """
    Cell-averaged order-th bump derivative on (-radius, radius), moment corrected.

    Averaging over only 16 or 8 reference cells leaves moments of the order of
    the cell width; the correction cancels them so that the listed degrees
    vanish to rounding level on the coarse cells.

    Returns:
        The profile (unnormalized) and the condition number of the correction
    """
    if cells < 2 or cells & (cells - 1):
        raise DomainError(f"cell count must be a power of two >= 2, got {cells}")
    exponent = math.log2(cells / (2 * radius))
    if not exponent.is_integer():
        raise DomainError(f"radius {radius} does not split into {cells} dyadic cells")
    edges_u = np.linspace(-1.0, 1.0, cells + 1)
    values = derivative_cell_averages(order, edges_u)
    values, condition = correct_moments(values, edges_u, list(moment_degrees))
    logger.debug("bump derivative order=%d cells=%d radius=%g condition=%.3e",
                 order, cells, radius, condition)
    return CellProfile(values, radius, int(exponent)), condition
