"""Stepwise mutation model: per-locus rates, category tables, and samplers.

Each locus j mutates down one repeat unit with probability `delta[j]`, up one
with probability `omega[j]`, and stays put otherwise, independently across
loci.  A transmission's mutation *category* d is the number of loci that
mutate.  For every category this module enumerates

  * a simple table: all C(r, d) locus subsets s with probability
    p(s) = prod_{j in s} mu_j * prod_{j not in s} (1 - mu_j), where
    mu_j = delta_j + omega_j; the category probability eta_d is the table sum;
  * an extended table: all 2^d * C(r, d) (subset, direction) rows with
    probability p(e) = prod_{j in s} p_j(dir_j) * prod_{j not in s} (1 - mu_j),
    which again sums to eta_d.

Extended tables are enumerated only while their row count stays under a cap;
larger categories fall back to manual sampling (subset via the simple table,
then one direction per chosen locus).  Both sampling routes induce the same
law on (subset, directions); the test suite checks this by chi-square.

Tables are built once per simulation (rates are constant) and are immutable
afterwards, safe to share across replicate runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .rng import AliasSampler, RandomStream

__all__ = [
    "MutationRates",
    "SimpleTable",
    "ExtendedTable",
    "MutationTables",
    "locus_step_probs",
    "config_prob",
    "extended_row_prob",
    "build_tables",
    "sample_config_from_table",
    "sample_config_fallback",
    "apply_config",
    "dump_tables",
]

DEFAULT_TABLE_CAP = 1_000_000

# Dense per-row delta matrices are precomputed for tables up to this many
# rows; larger tables decode sampled rows on demand.
_DENSE_DELTA_MAX = 4096


@dataclass(eq=False)
class MutationRates:
    """Per-locus downward (`delta`) and upward (`omega`) mutation rates.

    Requires 0 <= delta_j, 0 <= omega_j and delta_j + omega_j < 1 per locus.
    """

    delta: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        self.delta = np.atleast_1d(np.asarray(self.delta, dtype=np.float64))
        self.omega = np.atleast_1d(np.asarray(self.omega, dtype=np.float64))
        if self.delta.ndim != 1 or self.delta.shape != self.omega.shape:
            raise InvalidParameterError("delta and omega must be 1-D vectors of equal length")
        if self.delta.size < 1:
            raise InvalidParameterError("at least one locus is required")
        if np.any(~np.isfinite(self.delta)) or np.any(~np.isfinite(self.omega)):
            raise InvalidParameterError("rates must be finite")
        if np.any(self.delta < 0.0) or np.any(self.omega < 0.0):
            raise InvalidParameterError("rates must be non-negative")
        if np.any(self.delta + self.omega >= 1.0):
            raise InvalidParameterError("delta_j + omega_j must be < 1 for every locus")

    @classmethod
    def symmetric(cls, r: int, mu) -> "MutationRates":
        """Split a per-locus total rate evenly: delta_j = omega_j = mu_j / 2."""
        mu_vec = np.broadcast_to(np.asarray(mu, dtype=np.float64), (int(r),)).copy()
        return cls(mu_vec / 2.0, mu_vec / 2.0)

    @property
    def r(self) -> int:
        return self.delta.size

    @property
    def mu(self) -> np.ndarray:
        """Per-locus total mutation rate mu_j = delta_j + omega_j."""
        return self.delta + self.omega


def locus_step_probs(delta_j: float, omega_j: float) -> tuple[float, float, float]:
    """Single-locus step distribution: (P(-1), P(0), P(+1)).

    Returns (delta_j, 1 - delta_j - omega_j, omega_j).
    """
    delta_j = float(delta_j)
    omega_j = float(omega_j)
    if not (np.isfinite(delta_j) and np.isfinite(omega_j)):
        raise InvalidParameterError("rates must be finite")
    if delta_j < 0.0 or omega_j < 0.0 or delta_j + omega_j >= 1.0:
        raise InvalidParameterError(
            f"need 0 <= delta, 0 <= omega, delta + omega < 1; got ({delta_j}, {omega_j})"
        )
    return delta_j, 1.0 - delta_j - omega_j, omega_j


def config_prob(q, rates: MutationRates) -> float:
    """Probability of a full mutation configuration q in {-1, 0, +1}^r.

    The product of per-locus step probabilities; the all-zero configuration
    has probability eta_0 = prod_j (1 - mu_j).
    """
    qv = np.asarray(q, dtype=np.int64)
    if qv.shape != (rates.r,):
        raise InvalidParameterError(f"configuration must have length {rates.r}")
    if np.any((qv < -1) | (qv > 1)):
        raise InvalidParameterError("configuration entries must be in {-1, 0, +1}")
    per_locus = np.where(
        qv == -1, rates.delta, np.where(qv == 1, rates.omega, 1.0 - rates.mu)
    )
    return float(np.prod(per_locus))


def extended_row_prob(loci, signs, rates: MutationRates) -> float:
    """Probability of an extended-table row: directions `signs` on `loci`.

    p(e) = prod_{j in s} p_j(sign_j) * prod_{j not in s} (1 - mu_j).
    """
    loci = tuple(int(j) for j in loci)
    signs = tuple(int(v) for v in signs)
    if len(signs) != len(loci):
        raise InvalidParameterError("signs must be defined exactly on the locus subset")
    if len(set(loci)) != len(loci):
        raise InvalidParameterError("locus subset must not repeat loci")
    if any(j < 0 or j >= rates.r for j in loci):
        raise InvalidParameterError("locus index out of range")
    if any(v not in (-1, 1) for v in signs):
        raise InvalidParameterError("signs must be -1 or +1")
    p = 1.0
    in_s = np.zeros(rates.r, dtype=bool)
    for j, v in zip(loci, signs):
        in_s[j] = True
        p *= rates.omega[j] if v == 1 else rates.delta[j]
    p *= float(np.prod((1.0 - rates.mu)[~in_s]))
    return p


@dataclass(eq=False)
class SimpleTable:
    """All locus subsets of size d with their selection probabilities.

    `loci` holds the subsets as an (n_rows, d) int16 matrix, each row sorted
    ascending, rows in lexicographic order.  `probs` sums to eta_d.
    """

    d: int
    loci: np.ndarray
    probs: np.ndarray
    _sampler: AliasSampler | None = field(default=None, repr=False)

    @property
    def n_rows(self) -> int:
        return self.probs.size

    @property
    def eta(self) -> float:
        return float(self.probs.sum())

    def sampler(self) -> AliasSampler:
        """Prepared alias sampler over rows (built lazily, then cached)."""
        if self._sampler is None:
            self._sampler = AliasSampler(self.probs)
        return self._sampler


@dataclass(eq=False)
class ExtendedTable:
    """All (subset, direction) rows for category d.

    Row i selects subset `simple.loci[subset_idx[i]]`; bit k of
    `patterns[i]` gives the direction at the k-th locus of that subset
    (set = +1, clear = -1).  Rows are subset-major in the simple table's
    lexicographic order, direction patterns in increasing numeric order.
    `probs` sums to eta_d.
    """

    d: int
    simple: SimpleTable
    subset_idx: np.ndarray
    patterns: np.ndarray
    probs: np.ndarray
    deltas: np.ndarray | None = None
    _sampler: AliasSampler | None = field(default=None, repr=False)

    @property
    def n_rows(self) -> int:
        return self.probs.size

    @property
    def eta(self) -> float:
        return float(self.probs.sum())

    def sampler(self) -> AliasSampler:
        """Prepared alias sampler over rows (built lazily, then cached)."""
        if self._sampler is None:
            self._sampler = AliasSampler(self.probs)
        return self._sampler

    def delta_rows(self, idx, r: int) -> np.ndarray:
        """Decode row indices to (m, r) signed step vectors."""
        idx = np.atleast_1d(np.asarray(idx, dtype=np.int64))
        if self.deltas is not None:
            return self.deltas[idx]
        loci = self.simple.loci[self.subset_idx[idx]].astype(np.int64).reshape(idx.size, self.d)
        pat = self.patterns[idx].astype(np.int64)
        bits = (pat[:, None] >> np.arange(self.d, dtype=np.int64)) & 1
        signs = np.where(bits.astype(bool), 1, -1).astype(np.int8)
        out = np.zeros((idx.size, r), dtype=np.int8)
        np.put_along_axis(out, loci, signs, axis=1)
        return out

    def row_config(self, idx: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(loci, signs) for one row, loci ascending, signs in {-1, +1}."""
        loci = tuple(int(j) for j in self.simple.loci[int(self.subset_idx[idx])])
        pattern = int(self.patterns[idx])
        signs = tuple(1 if (pattern >> k) & 1 else -1 for k in range(self.d))
        return loci, signs


@dataclass(eq=False)
class MutationTables:
    """Precomputed category machinery for one set of rates.

    `eta[d]` is the probability that a transmission mutates at exactly d
    loci (eta sums to 1).  Categories with an entry in `extended` sample
    rows from the enumerated table; categories in `fallback_categories`
    exceeded the row cap and are sampled manually via their simple table.
    """

    rates: MutationRates
    eta: np.ndarray
    simple: dict[int, SimpleTable]
    extended: dict[int, ExtendedTable]
    fallback_categories: tuple[int, ...]
    table_cap: int
    up_share: np.ndarray  # omega_j / mu_j where mu_j > 0, else 0

    @property
    def r(self) -> int:
        return self.rates.r


def _simple_rows(rates: MutationRates, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Lexicographic subset matrix and probabilities for category d."""
    r = rates.r
    loci = np.array(list(itertools.combinations(range(r), d)), dtype=np.int16)
    loci = loci.reshape(-1, d)
    stay = 1.0 - rates.mu
    base = float(np.prod(stay))
    mu_prod = np.prod(rates.mu[loci], axis=1)
    stay_prod = np.prod(stay[loci], axis=1)
    probs = mu_prod * (base / stay_prod)
    return loci, probs


def _extended_rows(
    rates: MutationRates, simple: SimpleTable
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Enumerate (subset_idx, pattern, prob) for every row of E_d, chunked."""
    d = simple.d
    n_subsets = simple.n_rows
    n_patterns = 1 << d
    n_rows = n_subsets * n_patterns
    subset_idx = np.repeat(np.arange(n_subsets, dtype=np.int32), n_patterns)
    patterns = np.tile(np.arange(n_patterns, dtype=np.uint32), n_subsets)
    probs = np.empty(n_rows, dtype=np.float64)

    bits = ((np.arange(n_patterns, dtype=np.int64)[:, None] >> np.arange(d, dtype=np.int64)) & 1).astype(bool)
    stay = 1.0 - rates.mu
    base = float(np.prod(stay))
    chunk = max(1, 4_000_000 // max(1, n_patterns * d))
    for start in range(0, n_subsets, chunk):
        stop = min(start + chunk, n_subsets)
        loci = simple.loci[start:stop]  # (c, d)
        comp = base / np.prod(stay[loci], axis=1)  # (c,)
        choice = np.where(bits[None, :, :], rates.omega[loci][:, None, :], rates.delta[loci][:, None, :])
        probs[start * n_patterns : stop * n_patterns] = (
            comp[:, None] * choice.prod(axis=2)
        ).ravel()
    return subset_idx, patterns, probs


def _dense_deltas(table: ExtendedTable, r: int) -> np.ndarray:
    loci = table.simple.loci[table.subset_idx].astype(np.int64).reshape(-1, table.d)
    pat = table.patterns.astype(np.int64)
    bits = ((pat[:, None] >> np.arange(table.d, dtype=np.int64)) & 1).astype(bool)
    signs = np.where(bits, 1, -1).astype(np.int8)
    out = np.zeros((table.n_rows, r), dtype=np.int8)
    np.put_along_axis(out, loci, signs, axis=1)
    return out


def build_tables(rates: MutationRates, table_cap: int = DEFAULT_TABLE_CAP) -> MutationTables:
    """Enumerate simple and extended tables for every mutation category.

    eta_0 is the stay-put product prod_j (1 - mu_j); eta_d for d >= 1 is the
    simple-table row sum.  Extended tables are materialized only while
    2^d * C(r, d) <= table_cap; the remaining categories are flagged for
    manual fallback sampling.
    """
    if table_cap < 1:
        raise InvalidParameterError(f"table_cap must be >= 1, got {table_cap}")
    r = rates.r
    eta = np.empty(r + 1, dtype=np.float64)
    eta[0] = float(np.prod(1.0 - rates.mu))
    simple: dict[int, SimpleTable] = {}
    extended: dict[int, ExtendedTable] = {}
    fallback: list[int] = []
    for d in range(1, r + 1):
        loci, probs = _simple_rows(rates, d)
        stable = SimpleTable(d=d, loci=loci, probs=probs)
        simple[d] = stable
        eta[d] = stable.eta
        n_rows = (1 << d) * stable.n_rows
        if n_rows <= table_cap:
            subset_idx, patterns, eprobs = _extended_rows(rates, stable)
            etable = ExtendedTable(
                d=d, simple=stable, subset_idx=subset_idx, patterns=patterns, probs=eprobs
            )
            if n_rows <= _DENSE_DELTA_MAX:
                etable.deltas = _dense_deltas(etable, r)
            extended[d] = etable
        else:
            fallback.append(d)
    mu = rates.mu
    up_share = np.divide(rates.omega, mu, out=np.zeros(r, dtype=np.float64), where=mu > 0)
    return MutationTables(
        rates=rates,
        eta=eta,
        simple=simple,
        extended=extended,
        fallback_categories=tuple(fallback),
        table_cap=int(table_cap),
        up_share=up_share,
    )


def sample_config_from_table(
    table: ExtendedTable, stream: RandomStream
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Draw one (loci, signs) row with probability p(e) / eta_d."""
    idx = table.sampler().draw(stream)
    return table.row_config(idx)


def sample_config_fallback(
    d: int, rates: MutationRates, simple: SimpleTable, stream: RandomStream
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Manually sample a category-d configuration without an extended table.

    The subset is drawn from the simple table with probability p(s) / eta_d;
    each chosen locus then goes up with probability omega_j / mu_j.  The
    induced joint law equals the extended-table law.
    """
    if d < 1 or simple.d != d:
        raise InvalidParameterError(f"need the simple table for category {d}")
    sidx = simple.sampler().draw(stream)
    loci = simple.loci[sidx]
    mu = rates.mu[loci]
    assert np.all(mu > 0.0), "a zero-rate locus cannot be selected (p(s) = 0)"
    up = stream.gen.random(d) < rates.omega[loci] / mu
    signs = np.where(up, 1, -1)
    return tuple(int(j) for j in loci), tuple(int(v) for v in signs)


def fallback_delta_rows(
    d: int,
    rates: MutationRates,
    simple: SimpleTable,
    stream: RandomStream,
    count: int,
    out_r: int,
) -> np.ndarray:
    """Batch version of :func:`sample_config_fallback` returning step vectors.

    Draws `count` iid configurations and encodes each as a signed (count, r)
    delta row; used by the engine for categories above the table cap.
    """
    if count == 0:
        return np.zeros((0, out_r), dtype=np.int8)
    sidx = simple.sampler().draw_many(stream, count)
    loci = simple.loci[sidx].astype(np.int64)  # (count, d)
    mu = rates.mu[loci]
    up = stream.gen.random((count, d)) < np.divide(
        rates.omega[loci], mu, out=np.zeros_like(mu), where=mu > 0
    )
    signs = np.where(up, 1, -1).astype(np.int8)
    out = np.zeros((count, out_r), dtype=np.int8)
    np.put_along_axis(out, loci, signs, axis=1)
    return out


def apply_config(h, loci, signs) -> tuple[int, ...]:
    """Apply a mutation configuration: add each sign to its locus of `h`."""
    out = list(int(v) for v in h)
    for j, v in zip(loci, signs):
        out[j] += v
    return tuple(out)


def dump_tables(tables: MutationTables, fh) -> None:
    """Write every enumerated extended-table row as plain text.

    One row per line: ``d, comma-joined loci, signed loci, probability``.
    """
    for d in sorted(tables.extended):
        table = tables.extended[d]
        for i in range(table.n_rows):
            loci, signs = table.row_config(i)
            s_txt = ",".join(str(j) for j in loci)
            q_txt = ",".join(f"{'+' if v > 0 else '-'}{j}" for j, v in zip(loci, signs))
            fh.write(f"{d}, {s_txt}, {q_txt}, {float(table.probs[i])!r}\n")
