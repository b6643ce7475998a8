"""How fast the founder allele drifts away, by mutation rate.

Runs the same large single-locus population under three mutation rates with
a shared seed and snapshot grid.  Higher rates push the founder allele's
frequency down faster at every matched generation; the printed columns are
directly comparable because only the rate differs between runs.
"""

from haplosim import ConstantGrowth, MutationRates, SimulationConfig, drift_vs_mu

MUS = [0.001, 0.002, 0.003]

base = SimulationConfig(
    k=1_000_000,
    g=5_000,
    r=1,
    rates=MutationRates.symmetric(1, 0.0),  # replaced per run
    schedule=ConstantGrowth(1.0),
    seed=1,
    save_generations=tuple(range(100, 5_000, 100)),
)

curves = drift_vs_mu(MUS, base)

print("frequency of allele 0 at locus 1:")
print("generation " + "".join(f"  mu={mu:<7g}" for mu in MUS))
gens = curves[MUS[0]][0]
for idx, g in enumerate(gens):
    if g % 500 != 0:
        continue
    row = "".join(f"{curves[mu][1][idx]:>11.4f}" for mu in MUS)
    print(f"{g:>10} {row}")

final = {mu: curves[mu][1][-1] for mu in MUS}
print("\nat the last snapshot the ordering is:",
      " > ".join(f"mu={mu:g} ({final[mu]:.3f})" for mu in sorted(final)))
