"""Why simulate counts instead of individuals: a timing comparison.

The count engine's work per generation scales with the number of *distinct*
haplotypes, while the naive individual-based simulator pays per individual
and per locus.  This script times both on a small grid (medians over a few
replicates), then sweeps the locus count for the engine alone to show how
cheap extra loci are once the mutation tables are built.

Larger grids, e.g. k=5000 and g=200, widen the gap further; see the bench
subcommand of the command line for the full harness with timeouts.
"""

from haplosim.bench import format_report, run_cell, run_grid

print("count engine vs naive individual-based simulation")
cells = run_grid(
    ks=[1_000, 5_000],
    gs=[100],
    mus=[0.001, 0.003],
    r=3,
    replicates=5,
    seed=1,
)
print(format_report(cells))

print("engine-only sweep over the locus count (k=10,000, g=200):")
sweep = [
    run_cell(k=10_000, g=200, mu=0.003, r=r, replicates=3, seed=1, engine_only=True)
    for r in (1, 2, 4, 8, 12, 16, 20)
]
print(f"{'loci':>6} {'engine_s':>10}")
for cell in sweep:
    print(f"{cell.r:>6} {cell.engine_median:>10.4f}")
