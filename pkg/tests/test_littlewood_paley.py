import numpy as np
from pytest import approx, mark, raises

from analysis.errors import ConfigurationError, DomainError
from analysis.grid import SampledFunction, make_grid, sample_haar
from analysis.haar import HaarSubset
from analysis.littlewood_paley import (TLParams, build_filter_bank, convolve_band,
                                       convolve_scaled, f_norm, f_norm_details, lemma_constants,
                                       tkmn_component, tkmn_decay_table)
from experiments.oracles import naive_convolution, naive_f_norm


def test_bank_resolution_limits(bank_half, bank_small, grid10):
    assert bank_half.k_max == grid10.j_max - 4
    assert bank_small.k_max == grid10.j_max - 7


@mark.parametrize("bank_name", ("bank_half", "bank_small"))
def test_bank_kernels(request, bank_name):
    bank = request.getfixturevalue(bank_name)
    assert bank.max_moment_residual <= 1e-12
    assert np.max(np.abs(bank.band.moments(bank.m1))) <= 1e-12
    assert bank.band.l1_norm() == approx(1.0, rel=1e-12)
    assert bank.low.integral() == approx(1.0, rel=1e-12)
    assert bank.c0 > 0
    assert 0.25 <= bank.J[0] < bank.J[1] <= 0.75
    assert min(bank.fourier_min) > 0


@mark.parametrize("m1 radius j_max x_lo x_hi".split(), ((0, 0.5, 10, -1, 2),
                                                        (3, 0.3, 10, -1, 2),
                                                        (3, 0.5, 10, 0, 2),
                                                        (3, 2.0 ** -4, 8, -1, 2),
                                                        (8, 0.5, 10, -1, 2)))
def test_build_filter_bank_rejects(m1, radius, j_max, x_lo, x_hi):
    with raises(ConfigurationError):
        build_filter_bank(m1, radius, make_grid(j_max, x_lo, x_hi))


@mark.parametrize("bank_name", ("bank_half", "bank_small"))
def test_convolution_paths_agree(request, bank_name, rng, noise):
    bank = request.getfixturevalue(bank_name)
    f = noise(bank.grid, rng)
    for k in range(bank.k_max + 1):
        blocks = convolve_scaled(f, bank, k).samples
        fft = convolve_scaled(f, bank, k, method='fft').samples
        slow = naive_convolution(f, bank, k)
        scale = np.max(np.abs(slow))
        assert np.max(np.abs(blocks - slow)) <= 1e-10 * scale
        assert np.max(np.abs(fft - slow)) <= 1e-10 * scale


def test_convolution_rejects_bad_scale_and_method(bank_small, grid10):
    f = SampledFunction.zeros(grid10)
    with raises(DomainError):
        convolve_band(f, bank_small, bank_small.k_max + 1)
    with raises(ConfigurationError):
        convolve_band(f, bank_small, 0, method='direct')


def test_band_convolution_vanishes_away_from_jumps(bank_small, grid10):
    points = grid10.points
    for j in range(bank_small.k_max):
        jumps = np.ldexp(np.array([0.0, 1.0, 2.0]), -j - 1)
        for k in range(j + 1, bank_small.k_max + 1):
            conv = convolve_band(sample_haar(grid10, (j, 0)), bank_small, k).samples
            reach = np.ldexp(bank_small.support_radius, -k)
            away = np.min(np.abs(points[:, None] - jumps[None, :]), axis=1) >= reach
            assert np.max(np.abs(conv[away])) <= 1e-12


def test_calibration_identity(bank_small, grid10):
    # psi * h_{0,0}(x) = -2 Psi(x - 1/2) on [1/4, 3/4]
    conv = convolve_band(sample_haar(grid10, (0, 0)), bank_small, 0).samples
    primitive = bank_small.primitive().samples
    for x in np.arange(0.25, 0.75 + 2.0 ** -10, 2.0 ** -6):
        i = grid10.index_of(x)
        assert conv[i] == approx(-2 * primitive[grid10.index_of(x - 0.5)], abs=1e-12)


def test_haar_convolution_is_translation_invariant(bank_small, grid10):
    for j in range(4):
        first = convolve_band(sample_haar(grid10, (j, 0)), bank_small, 2).samples
        last = convolve_band(sample_haar(grid10, (j, (1 << j) - 1)), bank_small, 2).samples
        assert np.max(np.abs(first)) == approx(np.max(np.abs(last)), rel=1e-12)


def test_tl_params_validation():
    for args in ((1.0, 2.0, 0.0), (2.0, np.inf, 0.0), (2.0, 2.0, np.nan), (2.0, 2.0, 0.0, -1)):
        with raises(ConfigurationError):
            TLParams(*args)
    assert TLParams(3.0, 1.5, 0.0).q_dual == approx(3.0)
    assert TLParams(4.0, 2.0, 0.0).p_dual == approx(4.0 / 3.0)


def test_f_norm_of_zero_and_homogeneity(bank_half, grid10, rng, noise):
    params = TLParams(3.0, 2.0, 0.2)
    assert f_norm(SampledFunction.zeros(grid10), params, bank_half) == 0.0
    f = noise(grid10, rng)
    assert f_norm(-2.5 * f, params, bank_half) == approx(2.5 * f_norm(f, params, bank_half),
                                                         rel=1e-12)


def test_f_norm_rejects_large_smoothness_and_truncation(bank_half, grid10):
    f = sample_haar(grid10, (0, 0))
    with raises(ConfigurationError):
        f_norm(f, TLParams(2.0, 2.0, 4.0), bank_half)
    with raises(ConfigurationError):
        f_norm(f, TLParams(2.0, 2.0, 0.0, bank_half.k_max + 1), bank_half)


@mark.parametrize("p q s".split(), ((2.0, 2.0, 0.0), (6.0, 1.5, -0.6), (1.5, 4.0, 0.5)))
def test_f_norm_matches_naive_evaluation(bank_small, grid10, rng, noise, p, q, s):
    f = noise(grid10, rng) + sample_haar(grid10, (2, 1))
    params = TLParams(p, q, s)
    assert f_norm(f, params, bank_small) == approx(naive_f_norm(f, params, bank_small), rel=1e-9)


def test_f_norm_details_contributions(bank_half, grid10):
    f = sample_haar(grid10, (1, 0))
    details = f_norm_details(f, TLParams(2.0, 2.0, 0.0), bank_half, workers=2)
    assert details.contributions.shape == (bank_half.k_max + 1,)
    assert details.value == approx(np.sqrt(np.sum(details.contributions ** 2)), rel=1e-12)


def test_truncation_lowers_the_norm(bank_half, grid10):
    f = sample_haar(grid10, (3, 2))
    full = f_norm(f, TLParams(2.0, 2.0, 0.3), bank_half)
    short = f_norm(f, TLParams(2.0, 2.0, 0.3, 2), bank_half)
    assert short < full


def test_tkmn_component_outside_levels_is_zero(bank_half, grid10, rng, noise):
    f = noise(grid10, rng)
    E = HaarSubset.full_levels([2])
    assert tkmn_component(f, E, 1, 0, 1, bank_half).is_zero()
    assert tkmn_component(f, E, 1, 1, -3, bank_half).is_zero()
    assert not tkmn_component(f, E, 1, 1, 0, bank_half).is_zero()
    with raises(DomainError):
        tkmn_component(f, E, -1, 3, 0, bank_half)


def test_tkmn_decay_table(bank_half, grid10, rng, noise):
    f = noise(grid10, rng)
    E = HaarSubset.full_levels(range(6))
    table = tkmn_decay_table(f, E, 0, bank_half, range(3), range(3))
    assert set(table.ratios) == {(m, n) for m in range(3) for n in range(3)}
    assert np.isfinite(table.constant) and table.constant == max(table.ratios.values())
    with raises(DomainError):
        tkmn_decay_table(SampledFunction.zeros(grid10), E, 0, bank_half)


def test_lemma_constants_are_finite(bank_small):
    constants = lemma_constants(bank_small, max_gap=3, p_values=(1.0, 2.0))
    assert 0 < constants.size_constant < np.inf
    assert 0 < constants.lp_constant < np.inf
    assert constants.measured


def test_tkmn_decay_constant_is_frozen_across_functions(rng, noise, baseline):
    grid = make_grid(14, -1, 2)
    bank = build_filter_bank(3, 0.5, grid)
    E = HaarSubset.full_levels(range(7))
    constants = []
    for k in (0, 1):
        for _ in range(2):
            table = tkmn_decay_table(noise(grid, rng), E, k, bank, range(6), range(6))
            # k + m + n <= k_max = 10 leaves out (5, 5) at k = 1
            assert len(table.ratios) == 36 - k
            constants.append(table.constant)
    assert all(np.isfinite(constants))
    baseline("tkmn_decay_constant", {'C': max(constants)})
