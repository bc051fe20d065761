"""
Oracles Module
Slow reference implementations of the two norms, used to cross-check the fast paths.
"""

import math

import numpy as np

from analysis.grid import SampledFunction
from analysis.haar import HaarCoefficients
from analysis.littlewood_paley import FilterBank, TLParams


def naive_convolution(f: SampledFunction, bank: FilterBank, k: int) -> np.ndarray:
    """psi_k * f at the grid points by direct summation against the expanded kernel."""
    grid = f.grid
    profile = bank.low if k == 0 else bank.band
    width = profile.grid_cells(grid, k)
    kernel = np.repeat(profile.values, width) * (2.0 ** k)
    half = kernel.size // 2
    full = np.convolve(f.samples, kernel) * grid.delta
    return full[half - 1:half - 1 + grid.n_points]


def naive_f_norm(f: SampledFunction, params: TLParams, bank: FilterBank) -> float:
    k_max = params.resolve_k_max(bank)
    accum = np.zeros(f.grid.n_points)
    for k in range(k_max + 1):
        accum += (2.0 ** (k * params.s) * np.abs(naive_convolution(f, bank, k))) ** params.q
    inner = accum ** (params.p / params.q)
    return float(np.sum(inner) * f.grid.delta) ** (1.0 / params.p)


def naive_sequence_norm(coeffs: HaarCoefficients, p: float, q: float, s: float) -> float:
    """Entry-by-entry evaluation with explicit support indicators."""
    grid = coeffs.grid
    by_level = {}
    for idx, value in coeffs.items():
        level = max(idx.j, 0)
        width = 1 << (grid.j_max - level)
        start = idx.mu * width - grid.x_lo * (1 << grid.j_max)
        row = by_level.setdefault(idx.j, np.zeros(grid.n_points))
        row[start:start + width] += value
    accum = np.zeros(grid.n_points)
    for j, row in by_level.items():
        accum += math.pow(2.0, j * s * q) * np.abs(row) ** q
    return float(np.sum(accum ** (p / q)) * grid.delta) ** (1.0 / p)
