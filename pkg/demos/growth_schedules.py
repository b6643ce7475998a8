"""The four growth-schedule variants and their size trajectories.

Each schedule supplies the per-transition rate alpha_i; the realized size is
Poisson(alpha_i * N_{i-1}).  This script prints expected trajectories next
to one realized run for: exponential growth, growth-then-plateau, logistic
saturation, and an explicit per-generation rate list.
"""

import numpy as np

from haplosim import (
    ConstantGrowth,
    CustomGrowth,
    LogisticGrowth,
    MutationRates,
    PiecewiseGrowth,
    SimulationConfig,
    expected_sizes,
    simulate,
)

G = 200
N0 = 1_000

schedules = {
    "constant 1.5% growth": ConstantGrowth(1.015),
    "2% growth until generation 100, flat after": PiecewiseGrowth(beta=1.02, t=100, alpha=1.0),
    "logistic toward a 5,000 cap": LogisticGrowth(alpha=1.05, n_max=5_000),
    "custom: shrink 50 generations, then recover": CustomGrowth([0.99] * 50 + [1.02] * 150),
}

for name, schedule in schedules.items():
    expected = expected_sizes(schedule, N0, G)
    config = SimulationConfig(
        k=N0, g=G, r=1, rates=MutationRates.symmetric(1, 0.001),
        schedule=schedule, seed=7,
    )
    result = simulate(config)
    print(f"\n{name}")
    if not result.expected_sizes_exact:
        print("  (expected sizes are the mean-field recursion, not an exact expectation)")
    print("  generation   expected   realized")
    for i in (25, 50, 100, 150, 200):
        print(f"  {i:>10} {expected[i - 1]:>10.1f} {result.sizes[i]:>10}")
    ratio = result.sizes[1:] / np.maximum(expected, 1e-9)
    print(f"  realized/expected over the run: min {ratio.min():.3f}, max {ratio.max():.3f}")
