"""Forward-time Fisher-Wright engine on haplotype counts.

One generation transition works on the count table, never on individuals:

  1. the next total size is drawn as Poisson(alpha_i * N_i) from a dedicated
     size substream, so the realized size path depends only on seed and
     growth schedule, never on mutation rates;
  2. that total is split over (haplotype, mutation category) cells by a
     conditional multinomial with weights count(x) * eta_d, which by the
     Poisson splitting property is exactly equivalent to drawing independent
     Poisson(alpha_i * eta_d * count(x)) per cell;
  3. children of category d >= 1 pick their (loci, directions) row from the
     category's enumerated table (or the manual fallback above the row cap)
     and land in a fresh k-d tree for the next generation.

Size 0 is absorbing: the run stops at the first extinct generation and the
remaining size entries are zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .growth import GrowthSchedule, expected_sizes
from .mutation import (
    MutationRates,
    MutationTables,
    build_tables,
    fallback_delta_rows,
    DEFAULT_TABLE_CAP,
)
from .rng import RandomStream, multinomial, poisson
from .store import KdCountTree

__all__ = [
    "SimulationConfig",
    "PopulationState",
    "SimulationResult",
    "evolve_haplotype",
    "evolve_generation",
    "simulate",
]

Haplotype = tuple[int, ...]
CountTable = list[tuple[Haplotype, int]]


@dataclass(eq=False)
class SimulationConfig:
    """Full description of one simulation run.

    `k` is the initial population size, `g` the number of generations to
    evolve, `r` the locus count.  The population starts monomorphic at
    `initial_haplotype` (origin by default) unless `initial_population`
    provides an explicit count table, in which case `k` must equal its
    total.  `save_generations` lists the generations to snapshot.
    """

    k: int
    g: int
    r: int
    rates: MutationRates
    schedule: GrowthSchedule
    save_generations: tuple[int, ...] = ()
    seed: int = 0
    initial_haplotype: Haplotype | None = None
    table_cap: int = DEFAULT_TABLE_CAP
    initial_population: CountTable | None = None

    def __post_init__(self):
        self.k = int(self.k)
        self.g = int(self.g)
        self.r = int(self.r)
        if self.k < 0:
            raise InvalidParameterError(f"initial size k must be >= 0, got {self.k}")
        if self.g < 1:
            raise InvalidParameterError(f"generation count g must be >= 1, got {self.g}")
        if self.r < 1:
            raise InvalidParameterError(f"locus count r must be >= 1, got {self.r}")
        if self.rates.r != self.r:
            raise InvalidParameterError(
                f"mutation rates cover {self.rates.r} loci but r = {self.r}"
            )
        if not (0 <= int(self.seed) < 2**64):
            raise InvalidParameterError("seed must be a 64-bit unsigned integer")
        self.save_generations = tuple(sorted({int(s) for s in self.save_generations}))
        if self.save_generations and not (
            1 <= self.save_generations[0] and self.save_generations[-1] <= self.g
        ):
            raise InvalidParameterError("save_generations must lie within 1..g")
        if self.initial_haplotype is None:
            self.initial_haplotype = (0,) * self.r
        else:
            self.initial_haplotype = tuple(int(v) for v in self.initial_haplotype)
            if len(self.initial_haplotype) != self.r:
                raise InvalidParameterError(
                    f"initial haplotype must have length {self.r}"
                )
        if self.initial_population is not None:
            pop = [(tuple(int(v) for v in h), int(c)) for h, c in self.initial_population]
            if any(len(h) != self.r for h, _ in pop):
                raise InvalidParameterError("initial population haplotypes must have length r")
            if any(c < 1 for _, c in pop):
                raise InvalidParameterError("initial population counts must be >= 1")
            if sum(c for _, c in pop) != self.k:
                raise InvalidParameterError("initial population counts must sum to k")
            self.initial_population = pop


@dataclass(eq=False)
class PopulationState:
    """One completed generation: its index and frozen count store."""

    generation: int
    store: KdCountTree


@dataclass(eq=False)
class SimulationResult:
    """Realized sizes, expected sizes, and haplotype tables of one run.

    `sizes[i]` is N_i for i = 0..g; `expected_sizes` is aligned the same
    way (index 0 holds N_0).  `intermediates` maps each requested snapshot
    generation to its sorted count table (empty once extinct).
    `expected_sizes_exact` is False for schedules (logistic) where the
    deterministic recursion only approximates the expectation.
    """

    sizes: np.ndarray
    expected_sizes: np.ndarray
    final_haplotypes: CountTable
    intermediates: dict[int, CountTable] = field(default_factory=dict)
    extinct_at: int | None = None
    seed: int = 0
    expected_sizes_exact: bool = True


def _allocate_category(
    d: int,
    parent_rows: np.ndarray,
    pts: np.ndarray,
    tables: MutationTables,
    stream: RandomStream,
    sink: KdCountTree,
) -> None:
    """Place category-d children (one entry in `parent_rows` each) into `sink`.

    Every child draws a (subset, direction) row independently; with an
    enumerated table this aggregates identical (parent, row) pairs before
    insertion, which leaves the joint law untouched.
    """
    total = parent_rows.size
    r = pts.shape[1]
    table = tables.extended.get(d)
    if table is not None:
        ridx = table.sampler().draw_many(stream, total)
        key = parent_rows.astype(np.int64) * table.n_rows + ridx
        uniq, ucounts = np.unique(key, return_counts=True)
        upar = uniq // table.n_rows
        urow = uniq % table.n_rows
        children = pts[upar].astype(np.int32) + table.delta_rows(urow, r)
        sink.add_rows(children, ucounts)
    else:
        drows = fallback_delta_rows(d, tables.rates, tables.simple[d], stream, total, r)
        children = pts[parent_rows].astype(np.int32) + drows
        sink.add_rows(children, np.ones(total, dtype=np.int64))


def evolve_haplotype(
    h,
    n: int,
    alpha: float,
    tables: MutationTables,
    stream: RandomStream,
    sink: KdCountTree,
) -> None:
    """Spawn one haplotype's children directly into `sink`.

    For each mutation category d the child count is Poisson with mean
    alpha * eta_d * n, so the total is marginally Poisson(alpha * n);
    category-0 children are exact copies, the rest apply a sampled
    configuration.  This is the per-haplotype formulation; the generation
    loop uses the equivalent total-then-split scheme instead.
    """
    n = int(n)
    if n < 1:
        raise InvalidParameterError(f"haplotype count must be >= 1, got {n}")
    point = np.asarray(h, dtype=np.int32).reshape(1, -1)
    r = tables.r
    if point.shape[1] != r:
        raise InvalidParameterError(f"haplotype must have length {r}")
    for d in range(r + 1):
        z = poisson(stream, alpha * tables.eta[d] * n)
        if z == 0:
            continue
        if d == 0:
            sink.add_rows(point, np.array([z], dtype=np.int64))
        else:
            _allocate_category(d, np.zeros(z, dtype=np.int64), point, tables, stream, sink)


def evolve_generation(
    state: PopulationState,
    alpha: float,
    tables: MutationTables,
    size_stream: RandomStream,
    alloc_stream: RandomStream,
) -> PopulationState:
    """Evolve one generation transition; returns the next frozen state.

    The next total is Poisson(alpha * N_i) from `size_stream`; all placement
    randomness (which haplotype, which category, which mutation row) comes
    from `alloc_stream`.
    """
    store = state.store
    n_i = store.total_count
    r = store.r
    sink = KdCountTree(r, capacity=max(16, 2 * store.distinct_count))
    next_total = poisson(size_stream, alpha * n_i)
    if next_total == 0 or n_i == 0:
        return PopulationState(state.generation + 1, sink.freeze())

    pts = store.points()
    cnts = store.counts()
    weights = (cnts[:, None] * tables.eta[None, :]).ravel()
    cells = multinomial(alloc_stream, next_total, weights / weights.sum())
    cells = cells.reshape(cnts.size, r + 1)

    copies = cells[:, 0]
    keep = copies > 0
    if np.any(keep):
        sink.add_rows(pts[keep], copies[keep])

    for d in range(1, r + 1):
        z_d = cells[:, d]
        total_d = int(z_d.sum())
        if total_d == 0:
            continue
        parent_rows = np.repeat(np.arange(cnts.size, dtype=np.int64), z_d)
        _allocate_category(d, parent_rows, pts, tables, alloc_stream, sink)

    return PopulationState(state.generation + 1, sink.freeze())


def _initial_state(config: SimulationConfig) -> PopulationState:
    tree = KdCountTree(config.r)
    if config.initial_population is not None:
        if config.initial_population:
            rows = np.array([h for h, _ in config.initial_population], dtype=np.int32)
            deltas = np.array([c for _, c in config.initial_population], dtype=np.int64)
            tree.add_rows(rows, deltas)
    elif config.k > 0:
        tree.insert_or_add(config.initial_haplotype, config.k)
    return PopulationState(0, tree.freeze())


def simulate(config: SimulationConfig, replicate: int = 0) -> SimulationResult:
    """Run the full haplotype-count simulation described by `config`.

    `replicate` selects an independent substream family derived from
    (seed, replicate), so concurrent replicates stay reproducible.  Equal
    (config, replicate) pairs produce equal results.
    """
    tables = build_tables(config.rates, config.table_cap)
    root = RandomStream(config.seed, key=(int(replicate),))
    size_stream = root.substream(0)
    alloc_stream = root.substream(1)

    g = config.g
    sizes = np.zeros(g + 1, dtype=np.int64)
    sizes[0] = config.k
    expected = np.empty(g + 1, dtype=np.float64)
    expected[0] = config.k
    expected[1:] = expected_sizes(config.schedule, config.k, g)

    save_set = set(config.save_generations)
    intermediates: dict[int, CountTable] = {}
    state = _initial_state(config)
    extinct_at = None

    for i in range(1, g + 1):
        if sizes[i - 1] == 0:
            extinct_at = i
            break
        alpha_i = config.schedule.rate_at(i, float(sizes[i - 1]))
        state = evolve_generation(state, alpha_i, tables, size_stream, alloc_stream)
        sizes[i] = state.store.total_count
        if i in save_set:
            intermediates[i] = state.store.collect_sorted()
        if sizes[i] == 0:
            extinct_at = i
            break

    for s in config.save_generations:
        if s not in intermediates:
            intermediates[s] = []

    final = state.store.collect_sorted() if extinct_at is None else []
    return SimulationResult(
        sizes=sizes,
        expected_sizes=expected,
        final_haplotypes=final,
        intermediates=intermediates,
        extinct_at=extinct_at,
        seed=config.seed,
        expected_sizes_exact=config.schedule.expected_exact,
    )
