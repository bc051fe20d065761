#!/usr/bin/env python3
"""
Example script demonstrating the Haar Projection Lab library layer.

This script walks through the numerical components without the command line,
which can be useful for notebooks or automation.
"""


def example_usage():
    """Example of using the analysis and experiments layers."""

    print("=" * 60)
    print("Haar Projection Lab - Example Usage")
    print("=" * 60)
    print()

    from analysis import (HaarSubset, TLParams, analyze, build_filter_bank, f_norm, make_grid,
                          project, sample_haar, sequence_norm)
    from experiments import (ExperimentConfig, build_resources, estimate_projection_norm_lb,
                             predicted_exponent)

    print("Step 1: Build a grid and a Haar function")
    print("-" * 60)
    grid = make_grid(12, -1, 2)
    h = sample_haar(grid, (2, 1))
    print(f"grid {grid.describe()}, h_(2,1) has {grid.n_points} samples")
    print()

    print("Step 2: Haar coefficients and a projection")
    print("-" * 60)
    f = h + 0.5 * sample_haar(grid, (3, 0))
    coeffs = analyze(f, window=(0, 1))
    print(f"nonzero coefficients: {dict(coeffs.entries)}")
    kept = project(f, HaarSubset.full_levels([2]))
    error = float(abs(kept.samples - h.samples).max())
    print(f"projection onto level 2 recovers h_(2,1) up to {error:.1e}")
    print()

    print("Step 3: Dyadic and local-means norms")
    print("-" * 60)
    params = TLParams(3.0, 2.0, 0.2)
    bank = build_filter_bank(3, 0.5, grid)
    print(f"sequence norm: {sequence_norm(coeffs, params.p, params.q, params.s):.6f}")
    print(f"local-means norm ({bank.label()}): {f_norm(f, params, bank):.6f}")
    print()

    print("Step 4: Lower bound for a projection norm")
    print("-" * 60)
    config = ExperimentConfig(6.0, 2.0, -0.7, N_min=1, N_max=3, j_max=12, samples=4)
    resources = build_resources(config)
    E = HaarSubset.full_levels([0, 1, 2, 3])
    estimate = estimate_projection_norm_lb(E, resources.params, config, resources.bank,
                                           resources.atom, N=2)
    print(f"gamma_hat = {estimate.value:.6f} (family {estimate.family}, seed {estimate.seed})")
    prediction = predicted_exponent(config.p, config.q, config.s)
    print(f"regime {prediction.regime}, predicted exponent {prediction.exponent}")
    print()

    print("=" * 60)
    print("For growth curves run: python main.py experiment -c run.cfg")
    print("=" * 60)


if __name__ == '__main__':
    example_usage()
