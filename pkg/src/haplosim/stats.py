"""Post-processing of haplotype count tables.

A count table is a lexicographically sorted list of (haplotype, count)
pairs, exactly what the engine emits for final and intermediate
generations.  Locus indices here are 0-based; the command line uses the
1-based Locus1..LocusR labels of the table files.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .engine import CountTable, SimulationConfig, simulate
from .errors import InvalidParameterError
from .mutation import MutationRates

__all__ = [
    "ContingencyTable",
    "contingency",
    "top_k",
    "allele_trajectory",
    "drift_vs_mu",
]


def _locus_count(table: CountTable) -> int | None:
    return len(table[0][0]) if table else None


@dataclass(eq=False)
class ContingencyTable:
    """Allele-by-allele count matrix for a pair of loci, with labels."""

    row_alleles: np.ndarray
    col_alleles: np.ndarray
    matrix: np.ndarray

    @property
    def grand_total(self) -> int:
        return int(self.matrix.sum())


def contingency(table: CountTable, locus_a: int, locus_b: int) -> ContingencyTable:
    """Cross-tabulate counts by the alleles at two distinct loci."""
    if locus_a == locus_b:
        raise InvalidParameterError("contingency needs two distinct loci")
    r = _locus_count(table)
    if r is not None:
        for locus in (locus_a, locus_b):
            if not (0 <= locus < r):
                raise InvalidParameterError(f"locus index {locus} out of range for {r} loci")
    if not table:
        return ContingencyTable(
            row_alleles=np.empty(0, dtype=np.int64),
            col_alleles=np.empty(0, dtype=np.int64),
            matrix=np.zeros((0, 0), dtype=np.int64),
        )
    a_vals = np.array([h[locus_a] for h, _ in table], dtype=np.int64)
    b_vals = np.array([h[locus_b] for h, _ in table], dtype=np.int64)
    counts = np.array([c for _, c in table], dtype=np.int64)
    rows, a_idx = np.unique(a_vals, return_inverse=True)
    cols, b_idx = np.unique(b_vals, return_inverse=True)
    matrix = np.zeros((rows.size, cols.size), dtype=np.int64)
    np.add.at(matrix, (a_idx, b_idx), counts)
    return ContingencyTable(row_alleles=rows, col_alleles=cols, matrix=matrix)


def top_k(table: CountTable, k: int) -> CountTable:
    """The k most frequent rows, count-descending, haplotype-ascending ties."""
    if k < 1:
        raise InvalidParameterError(f"k must be >= 1, got {k}")
    return sorted(table, key=lambda row: (-row[1], row[0]))[:k]


def allele_trajectory(
    snapshots: dict[int, CountTable], locus: int, allele_window: int
) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Allele-frequency series at one locus across saved generations.

    Returns (generations, frequencies, labels) where frequencies has one
    row per non-extinct snapshot and one column per allele value in
    -allele_window..+allele_window plus a trailing "other" bucket; each row
    sums to 1.  Extinct (empty) snapshots are omitted.
    """
    if not snapshots:
        raise InvalidParameterError("at least one snapshot is required")
    if allele_window < 0:
        raise InvalidParameterError(f"allele window must be >= 0, got {allele_window}")
    alleles = list(range(-allele_window, allele_window + 1))
    labels = [str(a) for a in alleles] + ["other"]
    gens = []
    freq_rows = []
    for g in sorted(snapshots):
        table = snapshots[g]
        if not table:
            continue
        r = len(table[0][0])
        if not (0 <= locus < r):
            raise InvalidParameterError(f"locus index {locus} out of range for {r} loci")
        total = sum(c for _, c in table)
        row = np.zeros(len(alleles) + 1, dtype=np.float64)
        for h, c in table:
            a = h[locus]
            if -allele_window <= a <= allele_window:
                row[a + allele_window] += c
            else:
                row[-1] += c
        gens.append(g)
        freq_rows.append(row / total)
    return np.array(gens, dtype=np.int64), np.array(freq_rows, dtype=np.float64), labels


def drift_vs_mu(
    mus, base_config: SimulationConfig, locus: int = 0
) -> dict[float, tuple[np.ndarray, np.ndarray]]:
    """Allele-0 frequency trajectories for several total mutation rates.

    Each rate mu is split symmetrically (delta_j = omega_j = mu / 2) and run
    with the base config's seed and snapshot grid, so trajectories differ
    only through the rate.  Returns {mu: (generations, allele0_frequency)}
    with extinct generations omitted.
    """
    if not base_config.save_generations:
        raise InvalidParameterError("base config needs save_generations for trajectories")
    out: dict[float, tuple[np.ndarray, np.ndarray]] = {}
    for mu in mus:
        rates = MutationRates.symmetric(base_config.r, float(mu))
        config = dataclasses.replace(base_config, rates=rates)
        result = simulate(config)
        gens, freqs, _ = allele_trajectory(result.intermediates, locus, 0)
        out[float(mu)] = (gens, freqs[:, 0])
    return out
