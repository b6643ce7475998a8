"""Genetic drift of allele frequencies at a single locus.

A large constant-size population (one million copies, alpha = 1) is evolved
for 5,000 generations with intermediate snapshots every 100 generations.
The founder allele 0 loses frequency to its one-step neighbours; the table
printed here is the data behind the classic fanning-out frequency plot
(alleles -2..+2 plus an "other" bucket).

The population is deliberately large so the trajectory is close to its
deterministic limit; smaller populations show the same trend plus noise.
"""

from haplosim import (
    ConstantGrowth,
    MutationRates,
    SimulationConfig,
    allele_trajectory,
    simulate,
)

ALIM = 2

config = SimulationConfig(
    k=1_000_000,
    g=5_000,
    r=1,
    rates=MutationRates.symmetric(1, 0.003),
    schedule=ConstantGrowth(1.0),
    seed=1,
    save_generations=tuple(range(100, 5_000, 100)),
)
result = simulate(config)

gens, freqs, labels = allele_trajectory(result.intermediates, locus=0, allele_window=ALIM)

print("allele frequencies at locus 1 (every 500 generations shown):")
print("generation " + "".join(f"{label:>9}" for label in labels))
for g, row in zip(gens, freqs):
    if g % 500 == 0:
        print(f"{g:>10} " + "".join(f"{v:>9.4f}" for v in row))

print(f"\nallele 0 frequency: {freqs[0][ALIM]:.4f} at generation {gens[0]}"
      f" -> {freqs[-1][ALIM]:.4f} at generation {gens[-1]}")
print("each row sums to", freqs.sum(axis=1).round(12).max())
