"""Reference simulators used for validation and benchmarking.

`naive_simulate` is the individual-based counterpart of the count engine:
every individual draws its own Poisson offspring count and every child
mutates locus by locus with scalar draws.  No tables, no count aggregation,
no vectorization; it is deliberately the plain implementation whose slowness
the benchmark harness measures, and an independent code path for
distributional equivalence tests.

`classic_fw_step` is the textbook fixed-size multinomial Fisher-Wright
update (children choose parents uniformly at random), kept for testing the
multinomial primitive and classic drift properties.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

from .engine import SimulationConfig, SimulationResult
from .errors import InvalidParameterError
from .growth import expected_sizes
from .rng import RandomStream, multinomial, poisson

__all__ = ["naive_simulate", "classic_fw_step"]


def _sorted_table(individuals) -> list[tuple[tuple[int, ...], int]]:
    return sorted(Counter(individuals).items())


def naive_simulate(config: SimulationConfig, replicate: int = 0) -> SimulationResult:
    """Individual-based run with the same result shape as `simulate`.

    Distributionally identical to the count engine (Poisson superposition
    plus independent per-locus thinning); intended for small k * g only.
    """
    # Substream 2: indices 0 and 1 belong to the count engine (sizes and
    # allocation), so paired replicates of the two simulators stay independent.
    stream = RandomStream(config.seed, key=(int(replicate),)).substream(2)
    gen_random = stream.gen.random
    r = config.r
    down = [float(v) for v in config.rates.delta]
    up_from = [1.0 - float(v) for v in config.rates.omega]

    if config.initial_population is not None:
        individuals = [h for h, c in config.initial_population for _ in range(c)]
    else:
        individuals = [config.initial_haplotype] * config.k

    g = config.g
    sizes = np.zeros(g + 1, dtype=np.int64)
    sizes[0] = len(individuals)
    expected = np.empty(g + 1, dtype=np.float64)
    expected[0] = config.k
    expected[1:] = expected_sizes(config.schedule, config.k, g)

    save_set = set(config.save_generations)
    intermediates: dict[int, list] = {}
    extinct_at = None

    for i in range(1, g + 1):
        if sizes[i - 1] == 0:
            extinct_at = i
            break
        alpha_i = config.schedule.rate_at(i, float(sizes[i - 1]))
        children = []
        for hap in individuals:
            for _ in range(poisson(stream, alpha_i)):
                child = list(hap)
                for j in range(r):
                    u = gen_random()
                    if u < down[j]:
                        child[j] -= 1
                    elif u >= up_from[j]:
                        child[j] += 1
                children.append(tuple(child))
        individuals = children
        sizes[i] = len(individuals)
        if i in save_set:
            intermediates[i] = _sorted_table(individuals)
        if sizes[i] == 0:
            extinct_at = i
            break

    for s in config.save_generations:
        if s not in intermediates:
            intermediates[s] = []

    final = _sorted_table(individuals) if extinct_at is None else []
    return SimulationResult(
        sizes=sizes,
        expected_sizes=expected,
        final_haplotypes=final,
        intermediates=intermediates,
        extinct_at=extinct_at,
        seed=config.seed,
        expected_sizes_exact=config.schedule.expected_exact,
    )


def classic_fw_step(counts, n_const: int, stream: RandomStream) -> dict[tuple[int, ...], int]:
    """One constant-size multinomial Fisher-Wright step.

    `counts` maps haplotypes to counts summing to `n_const`; the next
    generation is Multinomial(n_const, counts / n_const).  Zero-count
    haplotypes are dropped from the returned table.
    """
    if isinstance(counts, dict):
        items = sorted(counts.items())
    else:
        items = sorted((tuple(h), int(c)) for h, c in counts)
    n_const = int(n_const)
    total = sum(c for _, c in items)
    if total != n_const:
        raise InvalidParameterError(f"counts sum to {total}, expected n_const = {n_const}")
    if n_const == 0:
        return {}
    haps = [h for h, _ in items]
    probs = np.array([c for _, c in items], dtype=np.float64) / n_const
    drawn = multinomial(stream, n_const, probs)
    return {h: int(c) for h, c in zip(haps, drawn) if c > 0}
