from pytest import approx, raises

from analysis.errors import ConfigurationError, DegenerateInputError, DomainError
from analysis.grid import SampledFunction, sample_haar
from analysis.haar import HaarSubset, SignAssignment
from analysis.littlewood_paley import f_norm
from experiments.projection import (CandidateContext, Estimate, build_candidate, derive_seed,
                                    estimate_projection_norm_lb, exhaustive_haar_search,
                                    explicit_draws, explicit_seed, haar_polynomials,
                                    projection_ratio)

E01 = HaarSubset.full_levels([0, 1])


def _estimate(config, resources, E=E01, **kwargs):
    return estimate_projection_norm_lb(E, resources.params, config, resources.bank,
                                       resources.atom, **kwargs)


def test_empty_subset_gives_zero(small_config, small_resources):
    assert _estimate(small_config, small_resources, HaarSubset()) == Estimate(0.0, None, None, 0)


def test_haar_function_is_a_fixed_point(small_config, small_resources):
    h = sample_haar(small_resources.grid, (1, 0))
    estimate = _estimate(small_config, small_resources, HaarSubset.full_levels([1]),
                         candidates=[h], families=())
    assert estimate.value == approx(1.0, rel=1e-9)
    assert estimate.family == 'explicit'
    assert estimate.evaluated == small_config.samples


def test_more_samples_never_lower_the_estimate(small_config, small_resources):
    few = _estimate(small_config, small_resources)
    many = _estimate(small_config.with_values(samples=4), small_resources)
    assert many.value >= few.value > 0
    assert many.evaluated == 4


def test_more_families_never_lower_the_estimate(small_config, small_resources):
    one = _estimate(small_config, small_resources)
    config = small_config.with_values(candidate_families=('section5', 'smooth_atom',
                                                          'random_bandlimited'))
    more = _estimate(config, small_resources)
    assert more.value >= one.value
    assert more.evaluated == 3 * small_config.samples


def test_estimate_is_reproducible_and_thread_independent(small_config, small_resources):
    first = _estimate(small_config, small_resources)
    assert _estimate(small_config, small_resources) == first
    assert _estimate(small_config.with_values(threads=3), small_resources) == first
    assert first.seed[:3] == (small_config.seed, 1, 0)


def test_zero_candidates_are_degenerate(small_config, small_resources):
    zero = SampledFunction.zeros(small_resources.grid)
    with raises(DegenerateInputError):
        _estimate(small_config, small_resources, candidates=[zero], families=())
    with raises(DegenerateInputError):
        projection_ratio(zero, E01, SignAssignment.constant([0, 1]), small_resources.params,
                         small_resources.bank)


def test_projection_ratio_bounds(small_resources):
    f = sample_haar(small_resources.grid, (0, 0)) + sample_haar(small_resources.grid, (1, 1))
    signs = SignAssignment({0: 1, 1: -1})
    value = projection_ratio(f, E01, signs, small_resources.params, small_resources.bank)
    assert value > 0
    assert projection_ratio(f, HaarSubset(), signs, small_resources.params,
                            small_resources.bank) == 0.0


def test_exhaustive_search_finds_the_fixed_point_optimum(small_resources):
    grid, bank, params = small_resources.grid, small_resources.bank, small_resources.params
    level_one = HaarSubset.full_levels([1])
    signs = [SignAssignment.constant([1])]
    assert len(list(haar_polynomials(HaarSubset.full_levels([0, 1]), 2, grid))) == 18

    # every +-h_{1,mu} is kept whole by P_E, so the optimum is exactly 1
    oracle = exhaustive_haar_search(level_one, params, bank, level_one, 1, signs)
    assert oracle.checked == 4
    assert oracle.value == approx(1.0, rel=1e-12)
    assert len(oracle.best) == 1

    # E misses the span entirely
    disjoint = exhaustive_haar_search(level_one, params, bank, HaarSubset.full_levels([0]), 1,
                                      signs)
    assert disjoint.checked == 2
    assert disjoint.value == 0.0 and disjoint.best is None


def test_exhaustive_search_matches_a_direct_maximum(small_resources):
    grid, bank, params = small_resources.grid, small_resources.bank, small_resources.params
    E = HaarSubset.from_indices([(1, 0)])
    h0, h1 = sample_haar(grid, (0, 0)), sample_haar(grid, (1, 0))
    direct = 0.0
    # constant signs: T f = P_E f, so the ratio is ||P_E f|| / ||f||
    for f, kept in ((h0, SampledFunction.zeros(grid)), (h1, h1), (h0 + h1, h1), (h0 - h1, h1)):
        direct = max(direct, f_norm(kept, params, bank) / f_norm(f, params, bank))
    assert direct >= 1.0 - 1e-12

    span = HaarSubset.from_indices([(0, 0), (1, 0)])
    oracle = exhaustive_haar_search(E, params, bank, span, 2, [SignAssignment.constant([1])])
    assert oracle.checked == 8
    assert oracle.value == approx(direct, rel=1e-12)


def test_explicit_draws_follow_the_estimator_seeds(small_config):
    draws = explicit_draws(E01, small_config, 1, candidate=2)
    assert len(draws) == small_config.samples
    assert draws[0].seed == explicit_seed(small_config.seed, 1, 2, 0) + (1,)


def test_seed_derivation():
    assert derive_seed(7, 3, 'section6', 2) == (7, 3, 1, 2)
    assert explicit_seed(7, 3, 0, 5) == (7, 3, 4, 0, 5)


def test_build_candidate_errors(small_resources):
    context = CandidateContext((0, 1), 1, small_resources.params, small_resources.bank,
                               small_resources.atom)
    with raises(DomainError):
        build_candidate('section6', context, (1, 1, 1, 0))
    with raises(ConfigurationError):
        build_candidate('wavelets', context, (1, 1, 1, 0))
    with raises(ConfigurationError):
        build_candidate('section5', context._replace(atom=None), (1, 1, 0, 0))


def test_bandlimited_candidate(small_resources):
    context = CandidateContext((0, 1), 1, small_resources.params, small_resources.bank, None)
    candidate = build_candidate('random_bandlimited', context, (1, 1, 3, 0))
    again = build_candidate('random_bandlimited', context, (1, 1, 3, 0))
    assert not candidate.function.is_zero()
    assert (candidate.function.samples == again.function.samples).all()
    assert candidate.subset is None


def test_exhaustive_search_rejects_empty_budget(small_resources):
    with raises(ConfigurationError):
        exhaustive_haar_search(E01, small_resources.params, small_resources.bank, E01, 0, [])
