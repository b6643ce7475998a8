"""Forward-time Fisher-Wright population simulation on haplotype counts.

The simulator evolves a table of (haplotype, count) pairs rather than
individuals: generation sizes follow a Poisson branching process with
flexible growth schedules, and haplotypes mutate under a per-locus
single-step model whose category tables are enumerated up front.  A naive
individual-based reference implementation and a benchmark harness are
included for validation and speed comparison.
"""

from .engine import (
    PopulationState,
    SimulationConfig,
    SimulationResult,
    evolve_generation,
    evolve_haplotype,
    simulate,
)
from .errors import InvalidParameterError, TableFormatError
from .growth import (
    ConstantGrowth,
    CustomGrowth,
    GrowthSchedule,
    LogisticGrowth,
    PiecewiseGrowth,
    expected_sizes,
    parse_growth,
)
from .mutation import (
    ExtendedTable,
    MutationRates,
    MutationTables,
    SimpleTable,
    apply_config,
    build_tables,
    config_prob,
    extended_row_prob,
    locus_step_probs,
    sample_config_fallback,
    sample_config_from_table,
)
from .oracle import classic_fw_step, naive_simulate
from .rng import AliasSampler, RandomStream, categorical, multinomial, poisson
from .stats import allele_trajectory, contingency, drift_vs_mu, top_k
from .store import KdCountTree

__version__ = "0.1.0"

__all__ = [
    "AliasSampler",
    "ConstantGrowth",
    "CustomGrowth",
    "ExtendedTable",
    "GrowthSchedule",
    "InvalidParameterError",
    "KdCountTree",
    "LogisticGrowth",
    "MutationRates",
    "MutationTables",
    "PiecewiseGrowth",
    "PopulationState",
    "RandomStream",
    "SimpleTable",
    "SimulationConfig",
    "SimulationResult",
    "TableFormatError",
    "allele_trajectory",
    "apply_config",
    "build_tables",
    "categorical",
    "classic_fw_step",
    "config_prob",
    "contingency",
    "drift_vs_mu",
    "evolve_generation",
    "evolve_haplotype",
    "expected_sizes",
    "extended_row_prob",
    "locus_step_probs",
    "multinomial",
    "naive_simulate",
    "parse_growth",
    "poisson",
    "sample_config_fallback",
    "sample_config_from_table",
    "simulate",
    "top_k",
]
