"""
Littlewood-Paley Module
Local-means filter banks, scaled convolutions psi_k * f, the F^s_{p,q} norm
estimator and the diagnostic operators T^k_{m,n}.

Kernels are piecewise-constant profiles (see analysis.kernels). For a grid
function f and a kernel constant on grid cells, the convolution at a grid point
x_i is exactly sum_m f_m K[i - m - 1], where K[c] is delta times the kernel value
on the cell [c delta, (c+1) delta). Both convolution paths evaluate that sum.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.signal import fftconvolve

from utils.config import (EXACT_TOL, MIN_BASE_KERNEL_CELLS, MIN_KERNEL_CELLS, MOMENT_TOL,
                          STANDARD_SUPPORT_RADII)
from utils.parallel import ordered_map
from .errors import ConfigurationError, DomainError
from .grid import DyadicGrid, SampledFunction, lp_norm, lp_norm_values, sample_haar
from .haar import HaarSubset, analyze, synthesize
from .kernels import CellProfile, bump_derivative_profile

logger = logging.getLogger(__name__)

CONVOLUTION_METHODS = ('blocks', 'fft')


def convolve_profile(samples: np.ndarray, grid: DyadicGrid, profile: CellProfile,
                     level: int, method: str = 'blocks') -> np.ndarray:
    """
    Convolve grid values with 2^level profile(2^level x) evaluated at the grid points.

    Args:
        samples: Cell values of the input on grid
        grid: Grid of the input
        profile: Kernel profile
        level: Dilation level
        method: 'blocks' (prefix sums, one pass per reference cell) or 'fft'
            (scipy.signal.fftconvolve against the expanded kernel)

    Returns:
        Output values at the grid points; the input is taken as zero outside the window
    """
    width = profile.grid_cells(grid, level)
    taps = np.ldexp(profile.values, level - grid.j_max)
    half = profile.cells * width // 2
    n = samples.size

    if method == 'fft':
        kernel = np.repeat(taps, width)
        full = fftconvolve(samples, kernel)
        return full[half - 1:half - 1 + n]
    if method != 'blocks':
        raise ConfigurationError('method', f"unknown convolution method {method!r}")

    padded = np.concatenate((np.zeros(half), samples, np.zeros(half)))
    prefix = np.concatenate(([0.0], np.cumsum(padded)))
    windows = prefix[width:] - prefix[:-width]
    out = np.zeros(n)
    for b, tap in enumerate(taps):
        if tap:
            start = 2 * half - (b + 1) * width
            out += tap * windows[start:start + n]
    return out


def place_profile(grid: DyadicGrid, profile: CellProfile, level: int,
                  center: float = 0.0, amplitude: float = 1.0) -> SampledFunction:
    """Sample amplitude * profile(2^level (x - center)) on the grid."""
    width = profile.grid_cells(grid, level)
    lo = center - math.ldexp(profile.radius, -level)
    start = grid.index_of(lo)
    stop = start + profile.cells * width
    if stop > grid.n_points:
        raise DomainError(f"profile around {center} at level {level} leaves the window")
    samples = np.zeros(grid.n_points)
    samples[start:stop] = np.repeat(profile.values * amplitude, width)
    return SampledFunction(grid, samples)


class Calibration(NamedTuple):
    c0: float
    J: Tuple[float, float]


@dataclass(frozen=True, eq=False)
class FilterBank:
    """
    Local-means kernels psi_0 (low pass) and psi (band) with calibration data.

    Attributes:
        grid: Grid the bank is built for
        m1: Number of certified vanishing moments (0..m1)
        support_radius: Kernels are supported in (-r, r)
        band: Profile of psi, normalized to unit L_1 norm
        low: Profile of psi_0, unit integral
        c0: Calibration lower bound on J
        J: Calibration interval inside [1/4, 3/4]
        max_moment_residual: Largest |integral psi x^n| over n <= m1
        condition: Condition number of the moment correction
        fourier_min: (min |psi^| on eps/4 < |xi| < eps, min |psi_0^| on |xi| < eps)
    """

    grid: DyadicGrid
    m1: int
    support_radius: float
    band: CellProfile
    low: CellProfile
    c0: float
    J: Tuple[float, float]
    max_moment_residual: float
    condition: float
    fourier_min: Tuple[float, float] = field(default=(0.0, 0.0))

    @property
    def k_max(self) -> int:
        return self.band.max_level(self.grid)

    @property
    def psi(self) -> SampledFunction:
        return place_profile(self.grid, self.band, 0)

    @property
    def psi0(self) -> SampledFunction:
        return place_profile(self.grid, self.low, 0)

    def kernel(self, k: int, band: bool = True) -> SampledFunction:
        """psi_k = 2^k psi(2^k x) sampled on the grid (psi_0 when band is False and k = 0)."""
        profile = self.band if band or k > 0 else self.low
        return place_profile(self.grid, profile, k, amplitude=2.0 ** k)

    def primitive(self) -> SampledFunction:
        """Psi(x) = integral of psi up to x, at the grid points."""
        psi = self.psi.samples
        values = np.concatenate(([0.0], np.cumsum(psi)[:-1])) * self.grid.delta
        return SampledFunction(self.grid, values)

    def label(self) -> str:
        return f"psi_m{self.m1}_r{self.support_radius:g}"

    def calibration_row(self) -> Dict[str, object]:
        return {
            'kernel': self.label(),
            'm1': self.m1,
            'support_radius': self.support_radius,
            'c0': self.c0,
            'J_lo': self.J[0],
            'J_hi': self.J[1],
            'max_moment_residual': self.max_moment_residual,
        }


def _calibrate(grid: DyadicGrid, band: CellProfile) -> Calibration:
    profile = convolve_profile(sample_haar(grid, (0, 0)).samples, grid, band, 0)
    lo = grid.index_of(0.25)
    hi = grid.index_of(0.75)
    scan = np.abs(profile[lo:hi + 1])
    peak = float(np.max(scan))
    if peak <= 0:
        raise DomainError("psi * h_(0,0) vanishes on [1/4, 3/4]; cannot calibrate")
    above = np.concatenate(([False], scan >= 0.5 * peak, [False]))
    changes = np.flatnonzero(np.diff(above.astype(np.int8)))
    starts, stops = changes[0::2], changes[1::2]
    best = int(np.argmax(stops - starts))
    first, last = int(starts[best]), int(stops[best]) - 1
    c0 = float(np.min(scan[first:last + 1]))
    delta = grid.delta
    return Calibration(c0, (0.25 + first * delta, 0.25 + last * delta))


def _fourier_minima(band: CellProfile, low: CellProfile, radius: float) -> Tuple[float, float]:
    eps = 1.0 / (2 * radius)
    annulus = np.linspace(eps / 4, eps, 513)[1:-1]
    ball = np.linspace(0.0, eps, 513)[:-1]
    return (float(np.min(np.abs(band.fourier(annulus)))),
            float(np.min(np.abs(low.fourier(ball)))))


def build_filter_bank(m1: int, support_radius: float, grid: DyadicGrid,
                      cells: int = MIN_KERNEL_CELLS) -> FilterBank:
    """
    Build and calibrate a local-means filter bank.

    psi is the (m1+1)-th bump derivative averaged over `cells` reference cells,
    corrected so that moments 0..m1 vanish and scaled to unit L_1 norm; psi_0 is
    the averaged bump with unit integral.

    Args:
        m1: Vanishing moment count (>= 1)
        support_radius: 1/2 or 2^-4
        grid: Target grid; its window must contain [-1, 1]
        cells: Reference cells across the support

    Returns:
        The calibrated bank

    Raises:
        ConfigurationError: On unsupported radius, m1 or resolution
        ConstructionError: If the moment correction is ill-conditioned
    """
    if not isinstance(m1, (int, np.integer)) or m1 < 1:
        raise ConfigurationError('m1', f"need an integer >= 1, got {m1!r}")
    if support_radius not in STANDARD_SUPPORT_RADII:
        raise ConfigurationError(
            'support_radius', f"must be one of {STANDARD_SUPPORT_RADII}, got {support_radius}")
    if grid.j_max < 4:
        raise ConfigurationError('j_max', f"filter banks need j_max >= 4, got {grid.j_max}")
    if 2 * support_radius * 2 ** grid.j_max < MIN_BASE_KERNEL_CELLS:
        raise ConfigurationError(
            'j_max', f"support 2*{support_radius} spans fewer than {MIN_BASE_KERNEL_CELLS} "
                     f"cells at j_max={grid.j_max}")
    if grid.x_lo > -1 or grid.x_hi < 1:
        raise ConfigurationError('window', "filter banks need a window containing [-1, 1]")
    if 2 * (m1 + 1) > cells:
        raise ConfigurationError(
            'm1', f"{m1 + 1} moment conditions need more than {cells} reference cells")

    band, condition = bump_derivative_profile(m1 + 1, support_radius, cells, range(m1 + 1))
    band = band.scaled(1.0 / band.l1_norm())
    low, _ = bump_derivative_profile(0, support_radius, cells)
    low = low.scaled(1.0 / low.integral())
    if band.cell_exponent > grid.j_max:
        raise ConfigurationError('j_max', "reference cells are finer than the grid")

    residual = float(np.max(np.abs(band.moments(m1))))
    calibration = _calibrate(grid, band)
    fourier_min = _fourier_minima(band, low, support_radius)
    logger.info("filter bank m1=%d r=%g: c0=%.6g J=[%.6g, %.6g] moment residual %.3e",
                m1, support_radius, calibration.c0, calibration.J[0], calibration.J[1], residual)
    logger.debug("fourier minima: band %.3e, low %.3e; condition %.3e",
                 fourier_min[0], fourier_min[1], condition)
    if residual > MOMENT_TOL:
        logger.warning("moment residual %.3e exceeds %.0e for m1=%d r=%g",
                       residual, MOMENT_TOL, m1, support_radius)
    if min(fourier_min) <= EXACT_TOL:
        logger.warning("kernel Fourier transform nearly vanishes on the check region: %s",
                       fourier_min)
    return FilterBank(grid, int(m1), support_radius, band, low, calibration.c0,
                      calibration.J, residual, condition, fourier_min)


def _check_scale(f: SampledFunction, bank: FilterBank, k: int):
    if f.grid != bank.grid:
        raise DomainError(f"grid mismatch: {f.grid} vs {bank.grid}")
    if not 0 <= k <= bank.k_max:
        raise DomainError(f"scale {k} outside [0, {bank.k_max}]")


def convolve_scaled(f: SampledFunction, bank: FilterBank, k: int,
                    method: str = 'blocks') -> SampledFunction:
    """psi_k * f in the local-means convention: psi_0 at k = 0, psi_k for k >= 1."""
    _check_scale(f, bank, k)
    profile = bank.low if k == 0 else bank.band
    return SampledFunction(f.grid, convolve_profile(f.samples, f.grid, profile, k, method))


def convolve_band(f: SampledFunction, bank: FilterBank, k: int,
                  method: str = 'blocks') -> SampledFunction:
    """psi_k * f with the band kernel at every scale, including k = 0."""
    _check_scale(f, bank, k)
    return SampledFunction(f.grid, convolve_profile(f.samples, f.grid, bank.band, k, method))


@dataclass(frozen=True)
class TLParams:
    """Exponents (p, q, s) of F^s_{p,q} and the truncation k_max of the scale sum."""

    p: float
    q: float
    s: float
    k_max: Optional[int] = None

    def __post_init__(self):
        for key in ('p', 'q'):
            value = getattr(self, key)
            if not (1 < value < math.inf):
                raise ConfigurationError(key, f"need 1 < {key} < inf, got {value}")
        if not math.isfinite(self.s):
            raise ConfigurationError('s', f"must be finite, got {self.s}")
        if self.k_max is not None and self.k_max < 0:
            raise ConfigurationError('k_max', f"must be >= 0, got {self.k_max}")

    @property
    def q_dual(self) -> float:
        return self.q / (self.q - 1)

    @property
    def p_dual(self) -> float:
        return self.p / (self.p - 1)

    def resolve_k_max(self, bank: FilterBank) -> int:
        if self.k_max is None:
            return bank.k_max
        if self.k_max > bank.k_max:
            raise ConfigurationError(
                'k_max', f"{self.k_max} exceeds the bank limit {bank.k_max}")
        return self.k_max


class FNorm(NamedTuple):
    value: float
    contributions: np.ndarray


def f_norm_details(f: SampledFunction, params: TLParams, bank: FilterBank,
                   workers: Optional[int] = None) -> FNorm:
    """
    Local-means norm ||(sum_{k<=k_max} 2^{ksq} |psi_k * f|^q)^{1/q}||_p with per-scale detail.

    Args:
        f: Function on the bank grid
        params: Exponents and truncation
        bank: Filter bank
        workers: Thread cap for the per-scale convolutions

    Returns:
        FNorm(value, contributions) with contributions[k] = ||2^{ks} psi_k * f||_p

    Raises:
        ConfigurationError: If m1 + 1 <= |s| or k_max exceeds the bank
    """
    if bank.m1 + 1 <= abs(params.s):
        raise ConfigurationError('s', f"|s| = {abs(params.s)} needs m1 + 1 > |s| (m1={bank.m1})")
    if f.grid != bank.grid:
        raise DomainError(f"grid mismatch: {f.grid} vs {bank.grid}")
    k_max = params.resolve_k_max(bank)
    p, q, s = params.p, params.q, params.s

    def scale_piece(k: int) -> np.ndarray:
        return np.abs(convolve_scaled(f, bank, k).samples) * 2.0 ** (k * s)

    accum = np.zeros(f.grid.n_points)
    contributions = np.zeros(k_max + 1)
    for k, piece in enumerate(ordered_map(scale_piece, range(k_max + 1), workers)):
        contributions[k] = lp_norm_values(piece, f.grid.delta, p)
        accum += piece ** q
    value = lp_norm_values(accum ** (1.0 / q), f.grid.delta, p)
    return FNorm(value, contributions)


def f_norm(f: SampledFunction, params: TLParams, bank: FilterBank,
           workers: Optional[int] = None) -> float:
    return f_norm_details(f, params, bank, workers).value


def tkmn_component(f: SampledFunction, E: HaarSubset, k: int, m: int, n: int,
                   bank: FilterBank) -> SampledFunction:
    """
    T^k_{m,n} f = sum over mu in E_{k+m} of 2^{k+m} <psi_{k+m+n} * f, h_{k+m,mu}> psi_k * h_{k+m,mu}.

    Zero when k+m is not a level of E or k+m+n < 0.

    Raises:
        DomainError: If k or k+m+n exceeds the bank, or level k+m is unresolvable
    """
    if k < 0:
        raise DomainError(f"scale k must be >= 0, got {k}")
    j, l = k + m, k + m + n
    if j not in E.levels or l < 0:
        return SampledFunction.zeros(f.grid)
    smoothed = convolve_scaled(f, bank, l)
    piece = synthesize(analyze(smoothed, [j]).restrict(E.restrict_levels([j])))
    return convolve_scaled(piece, bank, k)


class DecayTable(NamedTuple):
    ratios: Dict[Tuple[int, int], float]
    constant: float


def tkmn_decay_table(f: SampledFunction, E: HaarSubset, k: int, bank: FilterBank,
                     m_range: Iterable[int] = range(6),
                     n_range: Iterable[int] = range(6)) -> DecayTable:
    """
    Normalized sizes ||T^k_{m,n} f||_2 / (2^{-n/2} 2^{-m} ||f||_2) over a sweep.

    Pairs whose scales are not resolvable are skipped. The constant is the
    maximum ratio over the sweep.
    """
    base = lp_norm(f, 2)
    if base == 0:
        raise DomainError("decay table needs a nonzero function")
    ratios: Dict[Tuple[int, int], float] = {}
    for m in m_range:
        for n in n_range:
            j, l = k + m, k + m + n
            if l > bank.k_max or j > f.grid.j_max - 1:
                continue
            size = lp_norm(tkmn_component(f, E, k, m, n, bank), 2)
            ratios[(m, n)] = size / (2.0 ** (-n / 2 - m) * base)
    constant = max(ratios.values()) if ratios else 0.0
    return DecayTable(ratios, constant)


class LemmaConstants(NamedTuple):
    size_constant: float
    lp_constant: float
    measured: List[Tuple[int, int, int]]


def lemma_constants(bank: FilterBank, max_gap: int = 6,
                    p_values: Tuple[float, ...] = (1.0, 2.0, 4.0),
                    positions: Tuple[int, ...] = (0, -1)) -> LemmaConstants:
    """
    Measure the convolution size constants of the bank.

    size_constant is the max of max_x |psi_k * h_{j,mu}| 2^{2(j-k)} over
    0 <= j-k <= max_gap; lp_constant is the max of ||psi_k * h_{j,mu}||_p 2^{k/p}
    over k >= j. Positions are taken modulo 2^j within [0, 1).

    Returns:
        LemmaConstants with the sampled (k, j, mu) triples
    """
    grid = bank.grid
    size_constant = 0.0
    lp_constant = 0.0
    measured: List[Tuple[int, int, int]] = []
    for k in range(bank.k_max + 1):
        for j in range(0, min(k + max_gap, grid.j_max - 1) + 1):
            for position in positions:
                mu = position % (1 << j)
                h = sample_haar(grid, (j, mu))
                conv = convolve_band(h, bank, k)
                if j >= k:
                    peak = float(np.max(np.abs(conv.samples)))
                    size_constant = max(size_constant, peak * 4.0 ** (j - k))
                if k >= j:
                    for p in p_values:
                        lp_constant = max(lp_constant, lp_norm(conv, p) * 2.0 ** (k / p))
                measured.append((k, j, mu))
    logger.debug("lemma constants for %s: size %.6g, lp %.6g",
                 bank.label(), size_constant, lp_constant)
    return LemmaConstants(size_constant, lp_constant, measured)
