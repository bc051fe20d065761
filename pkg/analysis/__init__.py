"""Analysis package: grids, Haar projections, local-means norms and test functions."""

from .errors import (ConfigurationError, ConstructionError, DegenerateInputError,
                     DomainError, FittingError, HaarLabError)
from .grid import (DyadicGrid, HaarIndex, SampledFunction, inner_product, lp_norm,
                   make_grid, sample_haar)
from .haar import (DensityStats, HaarCoefficients, HaarSubset, SignAssignment, analyze,
                   density_stats, project, sequence_norm, signed_project, split_by_sign,
                   synthesize)
from .littlewood_paley import (FilterBank, TLParams, build_filter_bank, convolve_band,
                               convolve_scaled, f_norm, f_norm_details, lemma_constants,
                               tkmn_component, tkmn_decay_table)
from .adversarial import (Atom, Section5Spec, Section6Spec, SmoothAtomFamily,
                          aggregate_smooth_atoms, build_atom, interval_function_norm,
                          section5_function, section6_function, smooth_atom_sum)

__all__ = [
    'HaarLabError', 'ConfigurationError', 'DomainError', 'ConstructionError',
    'FittingError', 'DegenerateInputError',
    'DyadicGrid', 'SampledFunction', 'HaarIndex', 'make_grid', 'sample_haar',
    'inner_product', 'lp_norm',
    'HaarCoefficients', 'HaarSubset', 'SignAssignment', 'DensityStats', 'analyze',
    'synthesize', 'project', 'signed_project', 'split_by_sign', 'sequence_norm',
    'density_stats',
    'FilterBank', 'TLParams', 'build_filter_bank', 'convolve_scaled', 'convolve_band',
    'f_norm', 'f_norm_details', 'tkmn_component', 'tkmn_decay_table', 'lemma_constants',
    'Atom', 'Section5Spec', 'Section6Spec', 'SmoothAtomFamily', 'build_atom',
    'smooth_atom_sum', 'aggregate_smooth_atoms', 'interval_function_norm',
    'section5_function', 'section6_function',
]
