"""Inside the mutation machinery: category probabilities and tables.

For an r-locus stepwise model the number of loci that mutate in one
transmission follows the category distribution eta_0..eta_r.  Each category
d enumerates its C(r, d) locus subsets (simple table) and its
2^d * C(r, d) (subset, direction) rows (extended table); both sum to eta_d.
Categories whose extended table would exceed the row cap are sampled
manually instead, which this script demonstrates at r = 16.
"""

import io
import math

from haplosim import MutationRates, build_tables

# A small asymmetric model: locus 2 mutates upward three times as often as down.
rates = MutationRates([0.001, 0.001, 0.002], [0.001, 0.003, 0.002])
tables = build_tables(rates)

print("category probabilities (eta_d), r = 3:")
for d, eta in enumerate(tables.eta):
    print(f"  d={d}: {eta:.9f}")
print(f"  sum: {tables.eta.sum():.15f}")

print("\nextended table for d = 1 (loci are 0-based, probability p(e)):")
table = tables.extended[1]
for i in range(table.n_rows):
    loci, signs = table.row_config(i)
    arrow = "+1" if signs[0] > 0 else "-1"
    print(f"  locus {loci[0]} step {arrow}: p = {table.probs[i]:.9f}")
print(f"  rows sum to eta_1 = {table.probs.sum():.9f}")

buffer = io.StringIO()
from haplosim.mutation import dump_tables

dump_tables(tables, buffer)
print(f"\nplain-text dump of all extended rows: {len(buffer.getvalue().splitlines())} lines")

# With 16 loci the mid-size categories explode combinatorially; the default
# one-million row cap sends them down the manual sampling path instead.
wide = build_tables(MutationRates.symmetric(16, 0.003))
print("\nr = 16 with the default table cap:")
print(f"  enumerated categories: {sorted(wide.extended)}")
print(f"  manual-fallback categories: {list(wide.fallback_categories)}")
biggest = max(2**d * math.comb(16, d) for d in wide.fallback_categories)
print(f"  largest skipped table would have {biggest:,} rows")
